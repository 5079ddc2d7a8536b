# Tests for the overlay simulator
