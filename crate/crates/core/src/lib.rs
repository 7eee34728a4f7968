pub mod boolcube;
pub mod dist;
pub mod fourier_learn;
pub mod tester;
pub mod junta_learner;
pub mod reductions;
