//! Bessel and modified Bessel functions of order 0 and 1, their zeros, and the
//! radial eigenvalue problem for the Fourier-Bessel expansions.

mod bessel;
mod eigen;

pub use eigen::{j0_positive_roots, j1_positive_roots, robin_eigenvalues, EigenFamily, Eigenvalues};

use crate::error::{Error, Result};

/// Largest `x` for which `exp(x)` is finite.
const LN_MAX: f64 = 709.782_712_893_384;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    J,
    Y,
    I,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Zero,
    One,
}

/// One of the eight functions J0, J1, Y0, Y1, I0, I1, K0, K1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BesselFamily {
    pub kind: Kind,
    pub order: Order,
}

impl BesselFamily {
    pub const J0: Self = Self::new(Kind::J, Order::Zero);
    pub const J1: Self = Self::new(Kind::J, Order::One);
    pub const Y0: Self = Self::new(Kind::Y, Order::Zero);
    pub const Y1: Self = Self::new(Kind::Y, Order::One);
    pub const I0: Self = Self::new(Kind::I, Order::Zero);
    pub const I1: Self = Self::new(Kind::I, Order::One);
    pub const K0: Self = Self::new(Kind::K, Order::Zero);
    pub const K1: Self = Self::new(Kind::K, Order::One);

    pub const fn new(kind: Kind, order: Order) -> Self {
        Self { kind, order }
    }

    pub fn name(self) -> &'static str {
        match (self.kind, self.order) {
            (Kind::J, Order::Zero) => "J0",
            (Kind::J, Order::One) => "J1",
            (Kind::Y, Order::Zero) => "Y0",
            (Kind::Y, Order::One) => "Y1",
            (Kind::I, Order::Zero) => "I0",
            (Kind::I, Order::One) => "I1",
            (Kind::K, Order::Zero) => "K0",
            (Kind::K, Order::One) => "K1",
        }
    }

    fn check(self, x: f64) -> Result<()> {
        if x.is_nan() {
            return Err(Error::domain(self.name(), "argument is NaN"));
        }
        match self.kind {
            Kind::Y | Kind::K if x <= 0.0 => Err(Error::domain(
                self.name(),
                format!("requires x > 0, got {x:e}"),
            )),
            Kind::J | Kind::I if x < 0.0 => Err(Error::domain(
                self.name(),
                format!("requires x >= 0, got {x:e}"),
            )),
            _ if x.is_infinite() => Err(Error::domain(self.name(), "argument is infinite")),
            _ => Ok(()),
        }
    }

    fn index(self) -> usize {
        match self.order {
            Order::Zero => 0,
            Order::One => 1,
        }
    }
}

/// Evaluates the function at `x`.
///
/// I overflows past `x ~ 713` and returns [`Error::Overflow`]; K underflows to zero.
pub fn bessel_eval(spec: BesselFamily, x: f64) -> Result<f64> {
    spec.check(x)?;
    let i = spec.index();
    Ok(match spec.kind {
        Kind::J => bessel::j01(x)[i],
        Kind::Y => bessel::jy01(x)[2 + i],
        Kind::I => {
            let scaled = bessel::i01_scaled(x)[i];
            if x == 0.0 {
                return Ok(scaled);
            }
            let exponent = x + scaled.ln();
            if exponent > LN_MAX {
                return Err(Error::Overflow {
                    what: spec.name(),
                    exponent,
                    limit: LN_MAX,
                });
            }
            scaled * x.exp()
        }
        Kind::K => bessel::k01_scaled(x)[i] * (-x).exp(),
    })
}

/// Exponentially scaled evaluation: `e^-x I(x)`, `e^x K(x)`, unchanged for J and Y.
pub fn bessel_eval_scaled(spec: BesselFamily, x: f64) -> Result<f64> {
    spec.check(x)?;
    let i = spec.index();
    Ok(match spec.kind {
        Kind::J => bessel::j01(x)[i],
        Kind::Y => bessel::jy01(x)[2 + i],
        Kind::I => bessel::i01_scaled(x)[i],
        Kind::K => bessel::k01_scaled(x)[i],
    })
}

/// J0 for any real `x` (even extension).
pub fn j0(x: f64) -> f64 {
    bessel::j01(x.abs())[0]
}

/// J1 for any real `x` (odd extension).
pub fn j1(x: f64) -> f64 {
    let v = bessel::j01(x.abs())[1];
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// (J0, J1, Y0, Y1) at `x > 0` in one pass.
pub fn jy01(x: f64) -> Result<[f64; 4]> {
    BesselFamily::Y0.check(x)?;
    Ok(bessel::jy01(x))
}

/// (e^-x I0, e^-x I1) at `x >= 0`.
pub fn i01_scaled(x: f64) -> Result<[f64; 2]> {
    BesselFamily::I0.check(x)?;
    Ok(bessel::i01_scaled(x))
}

/// (e^x K0, e^x K1) at `x > 0`.
pub fn k01_scaled(x: f64) -> Result<[f64; 2]> {
    BesselFamily::K0.check(x)?;
    Ok(bessel::k01_scaled(x))
}
