//! Scalar analytic functions used as arguments of the functional calculus,
//! including the three piecewise exponential kernels `exp₊,t`, `exp₋,t`, `g_t`.


use crate::error::Error;
use crate::linalg::C64;

/// A scalar function analytic near the points where it is evaluated.
pub trait AnalyticFn {
    fn eval(&self, z: C64) -> C64;

    /// `f^{(order)}(z)` when known in closed form.
    fn derivative(&self, _z: C64, _order: usize) -> Option<C64> {
        None
    }

    /// Distance from `z` to the nearest point where the function stops being
    /// analytic. Contours built for this function keep circles inside that radius.
    fn singular_distance(&self, _z: C64) -> f64 {
        f64::INFINITY
    }

    /// The kernel this function represents, if any. Enables the convolution route.
    fn kernel(&self) -> Option<Kernel> {
        None
    }

    /// `Some(t)` when the function is `λ ↦ e^{λt}`.
    fn exp_time(&self) -> Option<f64> {
        None
    }
}

impl<F: Fn(C64) -> C64> AnalyticFn for F {
    fn eval(&self, z: C64) -> C64 {
        self(z)
    }
}

/// Which half-line the kernel lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelKind {
    /// `exp₊,t(λ) = e^{λt}` for `t > 0`, zero for `t < 0`.
    Plus,
    /// `exp₋,t(λ) = -e^{λt}` for `t < 0`, zero for `t > 0`.
    Minus,
    /// `g_t(λ)`: `exp₊,t` when `Re λ < 0`, `exp₋,t` when `Re λ > 0`.
    Green,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Plus => "exp+",
            KernelKind::Minus => "exp-",
            KernelKind::Green => "green",
        }
    }
}

/// `λ ↦ kernel_t(λ)` for a fixed nonzero time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    t: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, t: f64) -> Result<Self, Error> {
        if t == 0.0 || !t.is_finite() {
            return Err(Error::UndefinedAtZero);
        }
        Ok(Self { kind, t })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Time-domain value `t ↦ kernel_t(rate)`. NaN where undefined.
    pub fn at_time(kind: KernelKind, t: f64, rate: C64) -> C64 {
        let nan = C64::new(f64::NAN, f64::NAN);
        if t == 0.0 {
            return nan;
        }
        let plus = || if t > 0.0 { (rate * t).exp() } else { C64::new(0.0, 0.0) };
        let minus = || if t < 0.0 { -(rate * t).exp() } else { C64::new(0.0, 0.0) };
        match kind {
            KernelKind::Plus => plus(),
            KernelKind::Minus => minus(),
            KernelKind::Green => {
                if rate.re < 0.0 {
                    plus()
                } else if rate.re > 0.0 {
                    minus()
                } else {
                    nan
                }
            }
        }
    }

    /// Sign and activity of the kernel at `rate`: `Some(±1)` if the branch
    /// `±e^{λt}` is active, `None` if the kernel vanishes identically there.
    fn branch(&self, rate: C64) -> Option<f64> {
        let forward = match self.kind {
            KernelKind::Plus => true,
            KernelKind::Minus => false,
            KernelKind::Green => rate.re < 0.0,
        };
        match (forward, self.t > 0.0) {
            (true, true) => Some(1.0),
            (false, false) => Some(-1.0),
            _ => None,
        }
    }
}

impl AnalyticFn for Kernel {
    fn eval(&self, z: C64) -> C64 {
        Kernel::at_time(self.kind, self.t, z)
    }

    fn derivative(&self, z: C64, order: usize) -> Option<C64> {
        if self.kind == KernelKind::Green && z.re == 0.0 {
            return None;
        }
        Some(match self.branch(z) {
            Some(sign) => (z * self.t).exp() * self.t.powi(order as i32) * sign,
            None => C64::new(0.0, 0.0),
        })
    }

    fn singular_distance(&self, z: C64) -> f64 {
        match self.kind {
            KernelKind::Green => z.re.abs(),
            _ => f64::INFINITY,
        }
    }

    fn kernel(&self) -> Option<Kernel> {
        Some(*self)
    }
}

/// `λ ↦ e^{λt}`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exp {
    pub t: f64,
}

impl AnalyticFn for Exp {
    fn eval(&self, z: C64) -> C64 {
        (z * self.t).exp()
    }
    fn derivative(&self, z: C64, order: usize) -> Option<C64> {
        Some((z * self.t).exp() * self.t.powi(order as i32))
    }
    fn exp_time(&self) -> Option<f64> {
        Some(self.t)
    }
}

/// `λ ↦ λ^p`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Power(pub u32);

impl AnalyticFn for Power {
    fn eval(&self, z: C64) -> C64 {
        z.powu(self.0)
    }
    fn derivative(&self, z: C64, order: usize) -> Option<C64> {
        let p = self.0 as usize;
        if order > p {
            return Some(C64::new(0.0, 0.0));
        }
        let falling: f64 = ((p - order + 1)..=p).map(|k| k as f64).product();
        Some(z.powu((p - order) as u32) * falling)
    }
}

/// `λ ↦ 1 / (at - λ)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolvent {
    pub at: C64,
}

impl AnalyticFn for Resolvent {
    fn eval(&self, z: C64) -> C64 {
        (self.at - z).inv()
    }
    fn derivative(&self, z: C64, order: usize) -> Option<C64> {
        let fact: f64 = (1..=order).map(|k| k as f64).product();
        Some((self.at - z).powi(-(order as i32 + 1)) * fact)
    }
    fn singular_distance(&self, z: C64) -> f64 {
        (self.at - z).norm()
    }
}

/// `λ ↦ c`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant(pub C64);

impl AnalyticFn for Constant {
    fn eval(&self, _z: C64) -> C64 {
        self.0
    }
    fn derivative(&self, _z: C64, order: usize) -> Option<C64> {
        Some(if order == 0 { self.0 } else { C64::new(0.0, 0.0) })
    }
}
