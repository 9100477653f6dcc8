//! Home of the `acceptance` test target in `tests/acceptance.rs`.
