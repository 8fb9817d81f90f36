#include <doctest.h>

TEST_SUITE("hypergraph") {}
