//! Placeholder while the estimators are under construction.
