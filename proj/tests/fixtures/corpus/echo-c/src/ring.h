#ifndef RING_H
#define RING_H

#include <stddef.h>

struct ring {
    unsigned char *data;
    size_t cap;
    size_t head;
    size_t tail;
};

struct ring *ring_new(size_t capacity);

#endif
