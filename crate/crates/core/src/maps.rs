//! The chaotic maps: logistic map, generalized logistic map, and the cat-map
//! family acting on integer lattices.
//!
//! All operations are pure and the types are immutable after construction, so
//! values can be shared freely across threads.

use crate::grid::Grid;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("control parameter r must lie in (0, 4], got {0}")]
    ControlParameter(f64),
    #[error("state x must lie in (0, 1), got {0}")]
    State(f64),
    #[error("map parameters out of range: p={p} (want 0<p<1), q={q} (want 0<=q<=1)")]
    PiecewiseParameters { p: f64, q: f64 },
    #[error("map input must lie in [0, 1], got {0}")]
    UnitInterval(f64),
    #[error("lattice modulus must be at least 2, got {0}")]
    Modulus(u64),
    #[error("grid side {side} does not match lattice modulus {modulus}")]
    GridModulusMismatch { side: usize, modulus: u64 },
    #[error("grid is {width}x{height}, expected square")]
    NotSquare { width: usize, height: usize },
}

/// State of the quadratic recurrence x <- r*x*(1-x).
///
/// Construction enforces r in (0, 4] and x in (0, 1). Iteration does not
/// clamp: for r <= 4 the unit interval is forward-invariant, except for the
/// degenerate orbit at exactly r = 4, x = 0.5, which reaches 1.0 and then
/// absorbs at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticState {
    r: f64,
    x: f64,
}

impl LogisticState {
    pub fn new(r: f64, x: f64) -> Result<Self, MapError> {
        if !(r > 0.0 && r <= 4.0) {
            return Err(MapError::ControlParameter(r));
        }
        if !(x > 0.0 && x < 1.0) {
            return Err(MapError::State(x));
        }
        Ok(Self { r, x })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// One application of x <- r*x*(1-x); r is unchanged.
    pub fn step(self) -> Self {
        Self {
            r: self.r,
            x: self.r * self.x * (1.0 - self.x),
        }
    }

    /// Discards `burn_in` iterates, then returns the next `n` iterates in
    /// order (the current state itself is never emitted).
    pub fn orbit(self, burn_in: usize, n: usize) -> Vec<f64> {
        let mut state = self;
        for _ in 0..burn_in {
            state = state.step();
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            state = state.step();
            out.push(state.x);
        }
        out
    }
}

/// Parameters of the piecewise-quadratic unimodal map with vertex (p, q).
///
/// On [0, p] the map is -q/p^2*(p-x)^2 + q, on (p, 1] it is
/// -q/(1-p)^2*(p-x)^2 + q; both branches vanish at the interval endpoints
/// and meet continuously at x = p with value q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlmParams {
    p: f64,
    q: f64,
}

impl GlmParams {
    pub fn new(p: f64, q: f64) -> Result<Self, MapError> {
        if !(p > 0.0 && p < 1.0) || !(0.0..=1.0).contains(&q) {
            return Err(MapError::PiecewiseParameters { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// One application of the map; the image lies in [0, q].
    pub fn step(&self, x: f64) -> Result<f64, MapError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(MapError::UnitInterval(x));
        }
        let d = self.p - x;
        let scale = if x <= self.p {
            self.p * self.p
        } else {
            (1.0 - self.p) * (1.0 - self.p)
        };
        Ok(-self.q / scale * d * d + self.q)
    }
}

/// A point on the N x N integer lattice, both coordinates in [0, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticePoint {
    pub x: u64,
    pub y: u64,
}

impl LatticePoint {
    pub fn new(x: u64, y: u64) -> Self {
        Self { x, y }
    }

    /// Reduces both coordinates modulo the lattice side.
    pub fn reduced(x: u64, y: u64, modulus: u64) -> Self {
        Self {
            x: x % modulus,
            y: y % modulus,
        }
    }
}

/// 2x2 integer matrix with entries reduced modulo a fixed lattice side.
/// All products go through u128, so no intermediate overflows for any u64
/// modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Mat2 {
    pub n: u64,
    pub m: [[u64; 2]; 2],
}

impl Mat2 {
    pub fn new(n: u64, m: [[u64; 2]; 2]) -> Self {
        let r = |v: u64| v % n;
        Self {
            n,
            m: [[r(m[0][0]), r(m[0][1])], [r(m[1][0]), r(m[1][1])]],
        }
    }

    pub fn identity(n: u64) -> Self {
        Self::new(n, [[1, 0], [0, 1]])
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n as u128;
        let a = &self.m;
        let b = &other.m;
        let cell = |i: usize, j: usize| {
            ((a[i][0] as u128 * b[0][j] as u128 + a[i][1] as u128 * b[1][j] as u128) % n) as u64
        };
        Self {
            n: self.n,
            m: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }

    /// Binary exponentiation; `pow(0)` is the identity.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    pub fn apply(&self, x: u64, y: u64) -> (u64, u64) {
        let n = self.n as u128;
        let (x, y) = (x as u128, y as u128);
        let nx = (self.m[0][0] as u128 * x + self.m[0][1] as u128 * y) % n;
        let ny = (self.m[1][0] as u128 * x + self.m[1][1] as u128 * y) % n;
        (nx as u64, ny as u64)
    }
}

/// Area-preserving lattice automorphism [[1, a], [b, 1+ab]] mod N.
///
/// The determinant is 1 for every (a, b), so the map is invertible with
/// inverse [[1+ab, -a], [-b, 1]] mod N. The classical cat map is a = b = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusMap {
    a: u64,
    b: u64,
    modulus: u64,
}

impl TorusMap {
    pub fn new(a: u64, b: u64, modulus: u64) -> Result<Self, MapError> {
        if modulus < 2 {
            return Err(MapError::Modulus(modulus));
        }
        Ok(Self { a, b, modulus })
    }

    /// The classical map, a = b = 1.
    pub fn classical(modulus: u64) -> Result<Self, MapError> {
        Self::new(1, 1, modulus)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_classical(&self) -> bool {
        self.a % self.modulus == 1 && self.b % self.modulus == 1
    }

    pub(crate) fn matrix(&self) -> Mat2 {
        let n = self.modulus as u128;
        let a = self.a as u128 % n;
        let b = self.b as u128 % n;
        let d = ((1 + a * b) % n) as u64;
        Mat2::new(self.modulus, [[1, a as u64], [b as u64, d]])
    }

    pub(crate) fn inverse_matrix(&self) -> Mat2 {
        let n = self.modulus as u128;
        let a = self.a as u128 % n;
        let b = self.b as u128 % n;
        let d = ((1 + a * b) % n) as u64;
        let neg = |v: u128| ((n - v) % n) as u64;
        Mat2::new(self.modulus, [[d, neg(a)], [neg(b), 1]])
    }

    pub(crate) fn matrix_power(&self, k: u64) -> Mat2 {
        self.matrix().pow(k)
    }

    /// (x, y) -> (x + a*y, b*x + (1+ab)*y) mod N.
    pub fn forward(&self, pt: LatticePoint) -> LatticePoint {
        let (x, y) = self.matrix().apply(pt.x, pt.y);
        LatticePoint { x, y }
    }

    /// Inverse step; `inverse(forward(p)) == p` for every lattice point.
    pub fn inverse(&self, pt: LatticePoint) -> LatticePoint {
        let (x, y) = self.inverse_matrix().apply(pt.x, pt.y);
        LatticePoint { x, y }
    }

    /// Number of lattice points fixed by k applications of the map.
    /// The origin is always fixed, so the count is at least 1.
    pub fn fixed_points(&self, k: u64) -> u64 {
        let power = self.matrix_power(k);
        let n = self.modulus;
        let mut fixed = 0;
        for y in 0..n {
            for x in 0..n {
                if power.apply(x, y) == (x, y) {
                    fixed += 1;
                }
            }
        }
        fixed
    }

    /// Permutes a square grid by k applications of the map: the cell at
    /// `(x, y)` of the input lands at `forward^k (x, y)` in the output.
    /// k = 0 is the identity; the multiset of cells is always preserved.
    pub fn scramble<T: Copy>(&self, grid: &Grid<T>, k: u64) -> Result<Grid<T>, MapError> {
        let power = self.check_grid(grid)?.pow(k);
        let side = grid.width();
        let mut out = grid.clone();
        for y in 0..side {
            for x in 0..side {
                let (nx, ny) = power.apply(x as u64, y as u64);
                out.set(nx as usize, ny as usize, *grid.get(x, y));
            }
        }
        Ok(out)
    }

    /// Exact inverse of [`scramble`](Self::scramble) with the same k.
    pub fn unscramble<T: Copy>(&self, grid: &Grid<T>, k: u64) -> Result<Grid<T>, MapError> {
        let power = self.check_grid(grid)?.pow(k);
        let side = grid.width();
        let mut out = grid.clone();
        for y in 0..side {
            for x in 0..side {
                let (nx, ny) = power.apply(x as u64, y as u64);
                out.set(x, y, *grid.get(nx as usize, ny as usize));
            }
        }
        Ok(out)
    }

    fn check_grid<T>(&self, grid: &Grid<T>) -> Result<Mat2, MapError> {
        if !grid.is_square() {
            return Err(MapError::NotSquare {
                width: grid.width(),
                height: grid.height(),
            });
        }
        if grid.width() as u64 != self.modulus {
            return Err(MapError::GridModulusMismatch {
                side: grid.width(),
                modulus: self.modulus,
            });
        }
        Ok(self.matrix())
    }
}
