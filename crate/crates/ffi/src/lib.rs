//! C ABI for quext (placeholder).
