#include <stdlib.h>

#include "ring.h"

/**
 * @brief Allocate a ring buffer with room for capacity bytes.
 * @param capacity number of bytes the buffer can hold
 * @return a new ring buffer or NULL when allocation fails
 */
struct ring *ring_new(size_t capacity) {
    struct ring *r = malloc(sizeof *r);
    if (!r) return NULL;
    r->data = malloc(capacity);
    r->cap = capacity;
    r->head = r->tail = 0;
    return r;
}

/* Release the ring buffer and the storage that it owns. */
void ring_free(struct ring *r) {
    free(r->data);
    free(r);
}

// Push one byte into the ring buffer.
// Returns zero when the buffer is already full.
int ring_push(struct ring *r, unsigned char b) {
    size_t next = (r->head + 1) % r->cap;
    // full when head would catch up with tail
    if (next == r->tail) return 0;
    r->data[r->head] = b;
    r->head = next;
    return 1;
}

static int ring_empty(const struct ring *r) { return r->head == r->tail; }
