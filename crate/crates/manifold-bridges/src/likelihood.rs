//! Placeholder while the accumulators are under construction.
