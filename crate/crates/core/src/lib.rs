pub mod bifurcation;
pub mod large_omega;
pub mod monte_carlo;
pub mod numerics;
pub mod optimizer;
pub mod reference;
pub mod series;
pub mod special;
pub mod transition;
