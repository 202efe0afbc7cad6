package queue

import "errors"

// Queue is a first-in first-out list of integers backed by a slice.
type Queue struct {
	items []int
}

// Push appends a value to the back of the queue and grows the slice.
func (q *Queue) Push(v int) {
	q.items = append(q.items, v)
}

// Pop removes and returns the value at the front of the queue.
// It returns an error when the queue holds no values.
func (q *Queue) Pop() (int, error) {
	if len(q.items) == 0 {
		return 0, errors.New("empty queue")
	}
	v := q.items[0]
	// drop the first element from the slice
	q.items = q.items[1:]
	return v, nil
}

func (q *Queue) Len() int {
	return len(q.items)
}
