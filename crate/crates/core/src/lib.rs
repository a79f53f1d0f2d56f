//! Random walks in Dirichlet environments on finite directed graphs, and the
//! hypergeometric integrals that compute their Laplace transforms.
//!
//! - [`graph`]: graphs with a cemetery, trees, cycles, paths, flow charts and
//!   the hat graph.
//! - [`environment`]: Dirichlet environments, Green functions, Monte Carlo and
//!   Wilson's algorithm.
//! - [`integrals`]: quadrature and importance sampling of the integrals, and
//!   the identities relating them to the walk.
//! - [`connection`]: the Ω matrices of the integrable connection, their
//!   relations, flatness and transport.
//!
//! ```
//! use rwde::connection::{build_connection, check_flatness};
//! use rwde::graph::triangle;
//! use rwde::scalar::int;
//!
//! let conn = build_connection(&triangle());
//! let lambda = vec![int(1), int(2), int(3), int(7)];
//! assert_eq!(check_flatness(&conn, &[lambda]).unwrap(), 0.0);
//! ```

pub mod connection;
pub mod environment;
pub mod error;
pub mod graph;
pub mod integrals;
pub mod scalar;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/integrals.md")]
    mod integrals {}
    #[doc = include_str!("../../../book/src/connection.md")]
    mod connection {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
