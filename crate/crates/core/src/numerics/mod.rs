//! Self-contained numerical kernels: radix-2 FFT, symmetric Jacobi
//! eigensolver, k-means++/Lloyd clustering, minimum-cost assignment and
//! reproducible random streams.

mod assignment;
mod eigen;
mod fft;
mod kmeans;
mod matrix;
mod rng;

pub use assignment::{min_cost_assignment, Assignment};
pub use eigen::{eig_symmetric, EigenDecomposition};
pub use fft::{fft_real, ifft_real, is_power_of_two, next_power_of_two, FftPlan};
pub use kmeans::{kmeans, KMeans, MAX_LLOYD_ITERATIONS};
pub use matrix::SymmetricMatrix;
pub use rng::RngStream;
