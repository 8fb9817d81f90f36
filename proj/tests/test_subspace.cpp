#include <doctest.h>

TEST_SUITE("subspace") {}
