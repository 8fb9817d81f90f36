#include <doctest.h>

TEST_SUITE("motifs") {}
