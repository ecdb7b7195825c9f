#include "saa/harness.hpp"

int main(int argc, char** argv) {
  return saa::harness::cli_dispatch(argc, argv);
}
