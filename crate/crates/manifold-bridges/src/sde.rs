//! Placeholder while the engine is under construction.
