//! Ready-made quantile models for the Choquet engine.
//!
//! These cover the synthetic distributions used in tests and calibration:
//! uniforms, degenerate constants, affine transforms of another model, and
//! co-monotone sums. Distribution families with analytic tail structure
//! (normal, Student-t) live in [`crate::analytic`].

use crate::choquet::{QuantileModel, TailFlags};
use alloc::boxed::Box;

/// The standard uniform on `[0, 1]`; its quantile is the identity.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uniform01;

impl QuantileModel for Uniform01 {
    fn quantile(&self, u: f64) -> f64 {
        u
    }
}

/// The symmetric uniform on `[-1, 1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SymmetricUniform;

impl QuantileModel for SymmetricUniform {
    fn quantile(&self, u: f64) -> f64 {
        2.0 * u - 1.0
    }
}

/// A degenerate distribution putting all mass at one point.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl QuantileModel for Constant {
    fn quantile(&self, _u: f64) -> f64 {
        self.0
    }
}

/// `shift + scale * X` for a base model `X`, with `scale >= 0` so the
/// transform stays a quantile function.
#[derive(Clone, Copy, Debug)]
pub struct Affine<M> {
    pub inner: M,
    pub scale: f64,
    pub shift: f64,
}

impl<M: QuantileModel> Affine<M> {
    pub fn new(inner: M, scale: f64, shift: f64) -> Self {
        debug_assert!(scale >= 0.0, "a negative scale would reverse monotonicity");
        Affine {
            inner,
            scale,
            shift,
        }
    }
}

impl<M: QuantileModel> QuantileModel for Affine<M> {
    fn quantile(&self, u: f64) -> f64 {
        self.shift + self.scale * self.inner.quantile(u)
    }

    fn tail_flags(&self) -> TailFlags {
        if self.scale == 0.0 {
            TailFlags::BOUNDED
        } else {
            self.inner.tail_flags()
        }
    }
}

/// The quantile of a sum of co-monotone variables: quantiles add pointwise.
#[derive(Clone, Copy, Debug)]
pub struct ComonotoneSum<A, B>(pub A, pub B);

impl<A: QuantileModel, B: QuantileModel> QuantileModel for ComonotoneSum<A, B> {
    fn quantile(&self, u: f64) -> f64 {
        self.0.quantile(u) + self.1.quantile(u)
    }

    fn tail_flags(&self) -> TailFlags {
        let a = self.0.tail_flags();
        let b = self.1.tail_flags();
        TailFlags {
            lower_unbounded: a.lower_unbounded || b.lower_unbounded,
            upper_unbounded: a.upper_unbounded || b.upper_unbounded,
        }
    }
}

/// An arbitrary quantile given as a closure, with explicit tail flags.
pub struct QuantileClosure {
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    flags: TailFlags,
}

impl QuantileClosure {
    pub fn new<F>(eval: F, flags: TailFlags) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        QuantileClosure {
            eval: Box::new(eval),
            flags,
        }
    }
}

impl QuantileModel for QuantileClosure {
    fn quantile(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    fn tail_flags(&self) -> TailFlags {
        self.flags
    }
}
