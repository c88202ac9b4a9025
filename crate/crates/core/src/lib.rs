//! Exact computations on Umemura quadric fibrations
//! `x1^2 - x0 x2 + x3^2 + ... + x_{n-1}^2 + g(t0, t1) xn^2 = 0` over `P^1`:
//! squarefree reduction of `g`, singular points and their resolutions,
//! intersection numbers, links to other fibrations, maximality of the
//! automorphism group, and conjugacy through `PGL_2`-equivalence of forms.
//!
//! Algebra is generic over the scalar ([`scalar::Ring`], [`scalar::Field`]);
//! the aliases below fix the common instantiations.

pub mod binform;
pub mod birgeom;
pub mod error;
pub mod factor;
pub mod fibration;
pub mod interval;
pub mod mobius;
pub mod mpoly;
pub mod numfield;
pub mod parse;
pub mod pgl2equiv;
pub mod poly;
pub mod quadform;
pub mod ratfunc;
pub mod report;
pub mod resolution;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Rational;

/// Binary form with rational coefficients.
pub type BinaryForm = binform::Form<Rational>;
/// Binary form over a quadratic (or rational) number field.
pub type QuadraticFieldForm = binform::Form<numfield::NfElem>;
/// Möbius transformation with rational entries.
pub type RationalMobius = mobius::Mobius<Rational>;
/// Univariate polynomial with rational coefficients.
pub type RationalPoly = poly::Poly<Rational>;
/// Multivariate polynomial with rational coefficients.
pub type RationalMPoly = mpoly::MPoly<Rational>;
/// Gram matrix over the rational function field `Q(t)`.
pub type FunctionFieldGram = quadform::GramMatrix<ratfunc::RationalFunction>;

pub use roots::DEFAULT_PRECISION_CAP;
