#include <pybind11/pybind11.h>
PYBIND11_MODULE(_pandora, m) { m.doc() = "stack runtime bindings"; }
