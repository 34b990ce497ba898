//! Exact arithmetic in imaginary quadratic orders.
//!
//! An order is stored through its integral basis `(1, ω)` with
//! `ω² = t·ω − n`; for the maximal order `ω = √−d` when `d ≡ 1, 2 (mod 4)`
//! and `ω = (1 + √−d)/2` when `d ≡ 3 (mod 4)`. Elements are pairs of
//! rational integers `x + y·ω`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An imaginary quadratic order `Z + f·O_K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderSpec {
    field_disc: i64,
    squarefree: i64,
    conductor: i64,
    trace: i64,
    norm: i64,
}

fn is_squarefree(n: i64) -> bool {
    let mut k = 2i64;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl OrderSpec {
    /// Maximal order of the imaginary quadratic field with discriminant `disc`.
    pub fn maximal(disc: i64) -> Result<Self> {
        Self::with_conductor(disc, 1, false)
    }

    /// Order of conductor `conductor` in the field of discriminant `disc`.
    /// Non-maximal orders must be enabled explicitly.
    pub fn with_conductor(disc: i64, conductor: i64, allow_non_maximal: bool) -> Result<Self> {
        if disc >= 0 || !(disc.rem_euclid(4) == 0 || disc.rem_euclid(4) == 1) {
            return Err(Error::InvalidDiscriminant(disc));
        }
        if conductor < 1 {
            return Err(Error::InvalidDiscriminant(disc));
        }
        if conductor > 1 && !allow_non_maximal {
            return Err(Error::NonMaximalOrder(conductor));
        }
        // recover the squarefree kernel d of a fundamental discriminant
        let (squarefree, t0, n0) = if disc.rem_euclid(4) == 1 {
            let d = -disc;
            if d % 4 != 3 || !is_squarefree(d) {
                return Err(Error::InvalidDiscriminant(disc));
            }
            (d, 1, (1 + d) / 4)
        } else {
            let d = -disc / 4;
            if !(d % 4 == 1 || d % 4 == 2) || !is_squarefree(d) {
                return Err(Error::InvalidDiscriminant(disc));
            }
            (d, 0, d)
        };
        if conductor == 1 && (squarefree == 1 || squarefree == 3) {
            return Err(Error::ExcludedOrder(disc));
        }
        Ok(OrderSpec {
            field_disc: disc,
            squarefree,
            conductor,
            trace: conductor * t0,
            norm: conductor * conductor * n0,
        })
    }

    pub fn field_disc(&self) -> i64 {
        self.field_disc
    }

    /// Discriminant of the order itself, `f²·D`.
    pub fn disc(&self) -> i64 {
        self.conductor * self.conductor * self.field_disc
    }

    pub fn squarefree(&self) -> i64 {
        self.squarefree
    }

    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    /// Trace of the basis generator ω.
    pub fn omega_trace(&self) -> i64 {
        self.trace
    }

    /// Norm of the basis generator ω.
    pub fn omega_norm(&self) -> i64 {
        self.norm
    }

    /// `ω = (t + u·√−d)/2`, as the pair `(t, u)`.
    pub fn omega_descriptor(&self) -> (i64, i64) {
        let t = self.trace;
        if self.field_disc.rem_euclid(4) == 1 {
            (t, self.conductor)
        } else {
            (0, 2 * self.conductor)
        }
    }

    /// Norm-Euclidean maximal orders with the excluded cases removed.
    pub fn is_norm_euclidean(&self) -> bool {
        self.conductor == 1 && matches!(self.squarefree, 2 | 7 | 11)
    }

    pub fn elem(&self, x: i64, y: i64) -> QuadInt {
        QuadInt { x, y, order: *self }
    }

    pub fn zero(&self) -> QuadInt {
        self.elem(0, 0)
    }

    pub fn one(&self) -> QuadInt {
        self.elem(1, 0)
    }

    pub fn omega(&self) -> QuadInt {
        self.elem(0, 1)
    }

    /// The element `√−d` (times the conductor for non-maximal orders).
    pub fn sqrt_neg_d(&self) -> QuadInt {
        if self.field_disc.rem_euclid(4) == 1 {
            self.elem(-self.trace, 2)
        } else {
            self.elem(0, 1)
        }
    }

    /// Units of the order. Only `±1` occur once `Z[i]` and `Z[ζ₃]` are excluded.
    pub fn units(&self) -> [QuadInt; 2] {
        [self.one(), -self.one()]
    }

    /// Parse `x+y*w`, `w`, `-3`, `2-w`, or `sqrt-d`.
    pub fn parse(&self, s: &str) -> Result<QuadInt> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        if let Some(rest) = s.strip_prefix("sqrt-") {
            let d: i64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad radicand in {s}")))?;
            if d != self.squarefree {
                return Err(Error::Parse(format!(
                    "sqrt-{d} is not in the order of discriminant {}",
                    self.field_disc
                )));
            }
            return Ok(self.sqrt_neg_d());
        }
        let mut x = 0i64;
        let mut y = 0i64;
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1;
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -1;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
                i += 1;
            }
            let term: String = bytes[start..i].iter().collect();
            if term.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {s}")));
            }
            if let Some(coef) = term.strip_suffix('w') {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let c: i64 = if coef.is_empty() {
                    1
                } else {
                    coef.parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient '{coef}'")))?
                };
                y += sign * c;
            } else {
                let c: i64 = term
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad term '{term}'")))?;
                x += sign * c;
            }
        }
        Ok(self.elem(x, y))
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O(disc={}, f={})", self.field_disc, self.conductor)
    }
}

/// An element `x + y·ω` of an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub x: i64,
    pub y: i64,
    order: OrderSpec,
}

/// Wire form of a [`QuadInt`]: `{"x": int, "y": int}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadCoords {
    pub x: i64,
    pub y: i64,
}

impl Serialize for QuadInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadCoords { x: self.x, y: self.y }.serialize(s)
    }
}

impl QuadCoords {
    pub fn attach(self, order: &OrderSpec) -> QuadInt {
        order.elem(self.x, self.y)
    }
}

impl QuadInt {
    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    fn same_order(&self, other: &QuadInt) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::MixedOrder)
        }
    }

    pub fn checked_add(&self, o: &QuadInt) -> Result<QuadInt> {
        self.same_order(o)?;
        Ok(self.order.elem(self.x + o.x, self.y + o.y))
    }

    pub fn checked_sub(&self, o: &QuadInt) -> Result<QuadInt> {
        self.same_order(o)?;
        Ok(self.order.elem(self.x - o.x, self.y - o.y))
    }

    pub fn checked_mul(&self, o: &QuadInt) -> Result<QuadInt> {
        self.same_order(o)?;
        let (t, n) = (self.order.trace, self.order.norm);
        let yy = self.y * o.y;
        Ok(self
            .order
            .elem(self.x * o.x - n * yy, self.x * o.y + o.x * self.y + t * yy))
    }

    /// Galois conjugate, using `ω̄ = t − ω`.
    pub fn conj(&self) -> QuadInt {
        self.order.elem(self.x + self.order.trace * self.y, -self.y)
    }

    pub fn norm(&self) -> i64 {
        self.x * self.x + self.order.trace * self.x * self.y + self.order.norm * self.y * self.y
    }

    pub fn trace(&self) -> i64 {
        2 * self.x + self.order.trace * self.y
    }

    pub fn scale(&self, k: i64) -> QuadInt {
        self.order.elem(k * self.x, k * self.y)
    }

    /// Complex embedding with `Im ω > 0`, in double precision.
    pub fn to_c64(&self) -> num_complex::Complex64 {
        let (t, n) = (self.order.trace as f64, self.order.norm as f64);
        let re = t / 2.0;
        let im = (4.0 * n - t * t).sqrt() / 2.0;
        num_complex::Complex64::new(self.x as f64 + self.y as f64 * re, self.y as f64 * im)
    }

    /// `self / o` as exact rational coordinates `(X/M, Y/M)` with `M = N(o)`.
    fn div_coords(&self, o: &QuadInt) -> (i64, i64, i64) {
        let num = *self * o.conj();
        (num.x, num.y, o.norm())
    }

    /// Exact quotient when `o` divides `self`.
    pub fn exact_div(&self, o: &QuadInt) -> Result<Option<QuadInt>> {
        self.same_order(o)?;
        if o.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let (x, y, m) = self.div_coords(o);
        if x % m == 0 && y % m == 0 {
            Ok(Some(self.order.elem(x / m, y / m)))
        } else {
            Ok(None)
        }
    }

    pub fn divides(&self, other: &QuadInt) -> Result<bool> {
        if self.is_zero() {
            return Ok(other.is_zero());
        }
        Ok(other.exact_div(self)?.is_some())
    }

    /// Euclidean division: `self = q·o + r` with `N(r) < N(o)`.
    pub fn div_rem(&self, o: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        self.same_order(o)?;
        if !self.order.is_norm_euclidean() {
            return Err(Error::UnsupportedOrder(self.order.field_disc));
        }
        if o.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let (x, y, m) = self.div_coords(o);
        let fx = x.div_euclid(m);
        let fy = y.div_euclid(m);
        let mut best: Option<(QuadInt, QuadInt)> = None;
        for dx in 0..=1 {
            for dy in 0..=1 {
                let q = self.order.elem(fx + dx, fy + dy);
                let r = *self - q * *o;
                if best.map_or(true, |(_, br)| r.norm() < br.norm()) {
                    best = Some((q, r));
                }
            }
        }
        let (q, r) = best.expect("four candidates");
        debug_assert!(r.norm() < o.norm());
        Ok((q, r))
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x, self.y) {
            (x, 0) => write!(f, "{x}"),
            (0, 1) => write!(f, "w"),
            (0, -1) => write!(f, "-w"),
            (0, y) => write!(f, "{y}*w"),
            (x, 1) => write!(f, "{x}+w"),
            (x, -1) => write!(f, "{x}-w"),
            (x, y) if y > 0 => write!(f, "{x}+{y}*w"),
            (x, y) => write!(f, "{x}{y}*w"),
        }
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, o: QuadInt) -> QuadInt {
        self.checked_add(&o).expect("mixed-order addition")
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        self.checked_sub(&o).expect("mixed-order subtraction")
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, o: QuadInt) -> QuadInt {
        self.checked_mul(&o).expect("mixed-order multiplication")
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        self.order.elem(-self.x, -self.y)
    }
}

/// Extended gcd: returns `(g, u, v)` with `u·a + v·b = g`.
pub fn xgcd(a: &QuadInt, b: &QuadInt) -> Result<(QuadInt, QuadInt, QuadInt)> {
    a.same_order(b)?;
    let order = a.order;
    if !order.is_norm_euclidean() {
        return Err(Error::UnsupportedOrder(order.field_disc));
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let (mut r0, mut r1) = (*a, *b);
    let (mut s0, mut s1) = (order.one(), order.zero());
    let (mut t0, mut t1) = (order.zero(), order.one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1)?;
        r0 = r1;
        r1 = r;
        let s2 = s0 - q * s1;
        s0 = s1;
        s1 = s2;
        let t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    Ok((r0, s0, t0))
}

/// Coset representatives of `O/cO`, computed from the Smith normal form of
/// multiplication by `c` in the basis `(1, ω)`.
#[derive(Clone, Debug)]
pub struct Residues {
    modulus: QuadInt,
    // U with U·M·V = diag(d1, d2)
    u: [[i64; 2]; 2],
    d1: i64,
    d2: i64,
    reps: Vec<QuadInt>,
}

fn ext_gcd_int(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a >= 0 {
            (a, 1, 0)
        } else {
            (-a, -1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd_int(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn mat_mul2(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Smith normal form of a non-singular 2×2 integer matrix: `(U, D, V)`
/// with `U·M·V = D`, `D = diag(d1, d2)`, `d1 | d2`, both positive.
fn smith2(m: [[i64; 2]; 2]) -> ([[i64; 2]; 2], [[i64; 2]; 2], [[i64; 2]; 2]) {
    let mut a = m;
    let mut u = [[1, 0], [0, 1]];
    let mut v = [[1, 0], [0, 1]];
    loop {
        // clear column 0 below the pivot with row operations
        if a[1][0] != 0 {
            let (g, s, t) = ext_gcd_int(a[0][0], a[1][0]);
            let (p, q) = (a[0][0] / g, a[1][0] / g);
            let r = [[s, t], [-q, p]];
            a = mat_mul2(&r, &a);
            u = mat_mul2(&r, &u);
        }
        // clear row 0 right of the pivot with column operations
        if a[0][1] != 0 {
            let (g, s, t) = ext_gcd_int(a[0][0], a[0][1]);
            let (p, q) = (a[0][0] / g, a[0][1] / g);
            let c = [[s, -q], [t, p]];
            a = mat_mul2(&a, &c);
            v = mat_mul2(&v, &c);
        }
        if a[1][0] == 0 && a[0][1] == 0 {
            break;
        }
    }
    // enforce divisibility d1 | d2
    if a[1][1] % a[0][0] != 0 {
        // add row 1 to row 0, then re-run
        let r = [[1, 1], [0, 1]];
        a = mat_mul2(&r, &a);
        u = mat_mul2(&r, &u);
        let (u2, d2, v2) = smith2(a);
        return (mat_mul2(&u2, &u), d2, mat_mul2(&v, &v2));
    }
    for i in 0..2 {
        if a[i][i] < 0 {
            for j in 0..2 {
                u[i][j] = -u[i][j];
            }
            a[i][i] = -a[i][i];
        }
    }
    (u, a, v)
}

fn inverse_unimodular(u: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    debug_assert!(det == 1 || det == -1);
    [
        [u[1][1] * det, -u[0][1] * det],
        [-u[1][0] * det, u[0][0] * det],
    ]
}

impl Residues {
    pub fn new(c: &QuadInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let order = c.order;
        let cw = *c * order.omega();
        // columns are the coordinates of c·1 and c·ω
        let m = [[c.x, cw.x], [c.y, cw.y]];
        let (u, d, _v) = smith2(m);
        let (d1, d2) = (d[0][0], d[1][1]);
        debug_assert_eq!(d1 * d2, c.norm());
        let uinv = inverse_unimodular(&u);
        let mut reps = Vec::with_capacity((d1 * d2) as usize);
        for j in 0..d2 {
            for i in 0..d1 {
                let x = uinv[0][0] * i + uinv[0][1] * j;
                let y = uinv[1][0] * i + uinv[1][1] * j;
                reps.push(order.elem(x, y));
            }
        }
        Ok(Residues {
            modulus: *c,
            u,
            d1,
            d2,
            reps,
        })
    }

    pub fn modulus(&self) -> &QuadInt {
        &self.modulus
    }

    pub fn reps(&self) -> &[QuadInt] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Elementary divisors `(d1, d2)` of `O/cO ≅ Z/d1 × Z/d2`.
    pub fn invariants(&self) -> (i64, i64) {
        (self.d1, self.d2)
    }

    /// Index of the representative congruent to `x` modulo `c`.
    pub fn index_of(&self, x: &QuadInt) -> usize {
        let i = (self.u[0][0] * x.x + self.u[0][1] * x.y).rem_euclid(self.d1);
        let j = (self.u[1][0] * x.x + self.u[1][1] * x.y).rem_euclid(self.d2);
        (j * self.d1 + i) as usize
    }

    pub fn congruent(&self, x: &QuadInt, y: &QuadInt) -> bool {
        self.index_of(x) == self.index_of(y)
    }
}

/// Coset representatives of `O/cO`.
pub fn residues(c: &QuadInt) -> Result<Vec<QuadInt>> {
    Ok(Residues::new(c)?.reps)
}

/// A 2×2 matrix over an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: QuadInt,
    pub b: QuadInt,
    pub c: QuadInt,
    pub d: QuadInt,
}

/// Wire form of a [`Mat2`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Mat2Coords {
    pub a: QuadCoords,
    pub b: QuadCoords,
    pub c: QuadCoords,
    pub d: QuadCoords,
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let q = |e: &QuadInt| QuadCoords { x: e.x, y: e.y };
        Mat2Coords {
            a: q(&self.a),
            b: q(&self.b),
            c: q(&self.c),
            d: q(&self.d),
        }
        .serialize(s)
    }
}

impl Mat2Coords {
    pub fn attach(self, order: &OrderSpec) -> Mat2 {
        Mat2::new(
            self.a.attach(order),
            self.b.attach(order),
            self.c.attach(order),
            self.d.attach(order),
        )
    }
}

impl Mat2 {
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(order: &OrderSpec) -> Self {
        Mat2::new(order.one(), order.zero(), order.zero(), order.one())
    }

    /// Translation `(1, b; 0, 1)`.
    pub fn translation(b: QuadInt) -> Self {
        let o = *b.order();
        Mat2::new(o.one(), b, o.zero(), o.one())
    }

    /// `(0, −1; 1, 0)`.
    pub fn inversion(order: &OrderSpec) -> Self {
        Mat2::new(order.zero(), -order.one(), order.one(), order.zero())
    }

    pub fn order(&self) -> &OrderSpec {
        self.a.order()
    }

    pub fn det(&self) -> QuadInt {
        self.a * self.d - self.b * self.c
    }

    pub fn is_sl2(&self) -> bool {
        self.det() == self.order().one()
    }

    pub fn trace(&self) -> QuadInt {
        self.a + self.d
    }

    /// `adj(M) = (d, −b; −c, a)`, the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_sl2() {
            return Err(Error::BadDeterminant(self.det().to_string()));
        }
        Ok(self.adjugate())
    }

    /// Conjugation by `diag(1, −1)`: `(a, −b; −c, d)`.
    pub fn conj_by_reflection(&self) -> Self {
        Mat2::new(self.a, -self.b, -self.c, self.d)
    }

    /// Entry-wise exact division by a scalar.
    pub fn exact_div_scalar(&self, s: &QuadInt) -> Result<Option<Self>> {
        let parts = [
            self.a.exact_div(s)?,
            self.b.exact_div(s)?,
            self.c.exact_div(s)?,
            self.d.exact_div(s)?,
        ];
        match parts {
            [Some(a), Some(b), Some(c), Some(d)] => Ok(Some(Mat2::new(a, b, c, d))),
            _ => Ok(None),
        }
    }

    pub fn in_gamma0(&self, level: &Level) -> bool {
        self.is_sl2() && level.n.divides(&self.c).unwrap_or(false)
    }

    /// Largest entry norm.
    pub fn height(&self) -> i64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|e| e.norm())
            .max()
            .unwrap_or(0)
    }

    /// `A_N = (a, bN; c/N, d)` for `A ∈ Γ₀(N)`.
    pub fn smear(&self, level: &Level) -> Result<Self> {
        let cn = self.c.exact_div(&level.n)?.ok_or(Error::NotInGamma0)?;
        Ok(Mat2::new(self.a, self.b * level.n, cn, self.d))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

/// Level of a congruence subgroup `Γ₀(N)`, given by a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Level {
    pub n: QuadInt,
    pub ideal_norm: i64,
}

impl Level {
    pub fn new(n: QuadInt) -> Result<Self> {
        if n.is_zero() || n.is_unit() {
            return Err(Error::InvalidLevel);
        }
        Ok(Level {
            n,
            ideal_norm: n.norm(),
        })
    }

    pub fn generator(&self) -> &QuadInt {
        &self.n
    }
}

/// Seeded sampler for `Γ₀(N)` (or `SL₂(O)` when `level` is `None`).
pub struct Gamma0Sampler {
    order: OrderSpec,
    level: Option<Level>,
    height: i64,
    rng: ChaCha8Rng,
}

pub const MAX_SAMPLING_ATTEMPTS: usize = 10_000;

impl Gamma0Sampler {
    pub fn new(order: OrderSpec, level: Option<Level>, height: i64, seed: u64) -> Self {
        Gamma0Sampler {
            order,
            level,
            height,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn random_elem(&mut self, bound: i64) -> QuadInt {
        // coordinates bounded so that the norm stays comparable to `bound`
        let r = ((bound as f64).sqrt().ceil() as i64).max(1);
        loop {
            let e = self
                .order
                .elem(self.rng.gen_range(-r..=r), self.rng.gen_range(-r..=r));
            if e.norm() <= bound {
                return e;
            }
        }
    }

    /// Draw one matrix with all entry norms at most `height`.
    pub fn sample(&mut self) -> Result<Mat2> {
        let order = self.order;
        let nlev = self.level.map(|l| l.n).unwrap_or_else(|| order.one());
        for _ in 0..MAX_SAMPLING_ATTEMPTS {
            let cq = self.random_elem((self.height / nlev.norm()).max(0));
            let c = cq * nlev;
            let a = self.random_elem(self.height);
            let (u, v) = if c.is_zero() {
                if !a.is_unit() {
                    continue;
                }
                // a·a = 1 for a = ±1
                (a, order.zero())
            } else {
                let (g, u, v) = xgcd(&a, &c)?;
                if !g.is_unit() {
                    continue;
                }
                // u·a + v·c = g with g = ±1; multiply through by g
                (u * g, v * g)
            };
            // a·d − b·c = 1 with d = u + k·c, b = −v + k·a
            let mut d = u;
            let mut b = -v;
            if !c.is_zero() {
                let (k, _) = d.div_rem(&c)?;
                d = d - k * c;
                b = b - k * a;
            }
            let shift = self.random_elem(2);
            let shift = if c.is_zero() {
                self.random_elem(self.height)
            } else {
                shift
            };
            d = d + shift * c;
            b = b + shift * a;
            let m = Mat2::new(a, b, c, d);
            debug_assert!(m.is_sl2());
            if m.height() <= self.height && m.is_sl2() {
                return Ok(m);
            }
        }
        Err(Error::Sampling(MAX_SAMPLING_ATTEMPTS))
    }

    pub fn sample_n(&mut self, count: usize) -> Result<Vec<Mat2>> {
        (0..count).map(|_| self.sample()).collect()
    }
}

/// One seeded draw from `Γ₀(N)` with entry norms at most `height`.
pub fn random_gamma0(level: &Level, height: i64, seed: u64) -> Result<Mat2> {
    Gamma0Sampler::new(*level.n.order(), Some(*level), height, seed).sample()
}
