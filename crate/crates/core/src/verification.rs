//! Placeholder module; implemented in a subsequent commit.
