//! Decision procedures comparing two twisted flag varieties through `μ_T`.
//!
//! Each verdict records the measure and count comparisons it computed, the
//! geometric conclusions they license, and the chain of implications used.

use std::fmt;

use serde_json::{json, Value};

use crate::brauer::BrauerClass;
use crate::csa::{same_cyclic_subgroup, subgroup_generated, Csa};
use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, SquareClass};
use crate::measure::{count_measure, measure, TwistedVariety};
use crate::qform::{
    albert, anisotropic_over_q, bad_places, clifford_even_half, clifford_odd, isometric_over_q,
    QuadraticForm,
};
use crate::csa::quaternion_class;
use crate::rt::{rt_equal, RtElement};

/// Cap on the number of scalars tried when searching for a similarity factor.
const SIMILARITY_SEARCH_PRIMES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        }
    }

    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub measure_equal: bool,
    pub count_equal: bool,
    pub subgroup_equal: Option<bool>,
    pub isomorphic: Tri,
    pub birational: Tri,
    pub stably_birational: Tri,
    pub chain: Vec<String>,
    /// Factor pairs identified as isomorphic (product comparisons).
    pub matches: Vec<String>,
}

impl Verdict {
    fn new(measure_equal: bool, count_equal: bool) -> Self {
        let mut v = Verdict {
            measure_equal,
            count_equal,
            subgroup_equal: None,
            isomorphic: Tri::Unknown,
            birational: Tri::Unknown,
            stably_birational: Tri::Unknown,
            chain: Vec::new(),
            matches: Vec::new(),
        };
        v.note(if measure_equal {
            "measures agree in R_T(k)"
        } else {
            "measures differ in R_T(k)"
        });
        v
    }

    fn note(&mut self, s: impl Into<String>) {
        self.chain.push(s.into());
    }

    /// Propagates the implications iso ⇒ birational ⇒ stably birational and their
    /// contrapositives, and records that isomorphic varieties have equal measures.
    fn settle(mut self) -> Self {
        if !self.measure_equal && self.isomorphic != Tri::No {
            self.isomorphic = Tri::No;
            self.note("isomorphic varieties have equal Grothendieck classes, hence equal measures");
        }
        if self.isomorphic == Tri::Yes {
            self.birational = Tri::Yes;
        }
        if self.birational == Tri::Yes {
            self.stably_birational = Tri::Yes;
        }
        if self.stably_birational == Tri::No {
            self.birational = Tri::No;
        }
        if self.birational == Tri::No {
            self.isomorphic = Tri::No;
        }
        self
    }

    /// Checks iso=yes ⇒ bir=yes ⇒ stably=yes ⇒ measure_equal and
    /// measure_equal=false ⇒ iso=no.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.isomorphic == Tri::Yes && self.birational != Tri::Yes {
            return Err("isomorphic=yes but birational is not yes".into());
        }
        if self.birational == Tri::Yes && self.stably_birational != Tri::Yes {
            return Err("birational=yes but stably_birational is not yes".into());
        }
        if self.stably_birational == Tri::Yes && !self.measure_equal {
            return Err("stably_birational=yes but measures differ".into());
        }
        if !self.measure_equal && self.isomorphic != Tri::No {
            return Err("measures differ but isomorphic is not no".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "measure_equal": self.measure_equal,
            "count_equal": self.count_equal,
            "subgroup_equal": self.subgroup_equal,
            "isomorphic": self.isomorphic.as_str(),
            "birational": self.birational.as_str(),
            "stably_birational": self.stably_birational.as_str(),
            "chain": self.chain,
            "matches": self.matches,
        })
    }
}

fn same_field(a: &FieldDescriptor, b: &FieldDescriptor) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BackendMismatch(a.to_string(), b.to_string()))
    }
}

/// Measures and counts of both varieties, packed into a fresh verdict.
fn base(v1: &TwistedVariety, v2: &TwistedVariety) -> Result<(Verdict, RtElement, RtElement)> {
    same_field(&v1.field(), &v2.field())?;
    let (m1, m2) = (measure(v1)?, measure(v2)?);
    let measure_equal = rt_equal(&m1, &m2)?;
    let count_equal = count_measure(v1)? == count_measure(v2)?;
    Ok((Verdict::new(measure_equal, count_equal), m1, m2))
}

fn amitsur_known(field: &FieldDescriptor) -> bool {
    matches!(
        field,
        FieldDescriptor::Rational
            | FieldDescriptor::Real
            | FieldDescriptor::PAdic(_)
            | FieldDescriptor::Finite(_)
    )
}

pub fn compare_sb(a: &Csa, a2: &Csa) -> Result<Verdict> {
    let (mut v, _, _) = base(
        &TwistedVariety::SeveriBrauer(a.clone()),
        &TwistedVariety::SeveriBrauer(a2.clone()),
    )?;
    let same_deg = a.degree() == a2.degree();
    let same_group = same_cyclic_subgroup(a, a2)?;
    v.subgroup_equal = Some(same_group);
    v.note("equal measures <=> equal degree and <[A]> = <[A']>");
    if same_deg && a.class() == a2.class() {
        v.isomorphic = Tri::Yes;
        v.note("equal degree and class give A = A', hence SB(A) = SB(A')");
    } else if v.measure_equal {
        v.note("equal cyclic subgroups with distinct classes: isomorphism undecided");
    }
    if v.measure_equal {
        v.stably_birational = Tri::Yes;
        v.note("equal measures => equal cyclic subgroups => stably birational");
        let per = a.period();
        if amitsur_known(&a.field()) {
            v.birational = Tri::Yes;
            v.note("equal cyclic subgroups => birational (Amitsur's conjecture holds over global and local fields)");
        } else if matches!(per, 1 | 2 | 3 | 4 | 6) || (per == 5 && a.degree().is_multiple_of(2)) {
            v.birational = Tri::Yes;
            v.note(format!(
                "equal measures => birational (unconditional for period {per}{})",
                if per == 5 { " with even degree" } else { "" }
            ));
        } else {
            v.note(format!("birationality for period {per} depends on Amitsur's conjecture"));
        }
    } else if !same_group {
        v.stably_birational = Tri::No;
        v.note("stably birational varieties have equal kernels Br(k) -> Br(k(X)), which are <[A]> and <[A']>");
    } else {
        v.birational = Tri::No;
        v.note("different degrees give different dimensions, so not birational");
    }
    Ok(v.settle())
}

pub fn compare_gr(d: u64, a: &Csa, d2: u64, a2: &Csa) -> Result<Verdict> {
    let g1 = TwistedVariety::grassmannian(d, a.clone())?;
    let g2 = TwistedVariety::grassmannian(d2, a2.clone())?;
    if d == 1 && d2 == 1 {
        let mut v = compare_sb(a, a2)?;
        v.chain.insert(0, "Gr(1;A) = SB(A)".into());
        return Ok(v);
    }
    let (mut v, _, _) = base(&g1, &g2)?;
    let n = a.degree();
    let same_deg = n == a2.degree();
    let same_group = same_cyclic_subgroup(a, a2)?;
    v.subgroup_equal = Some(same_group);
    let complementary = same_deg && (d2 == d || d2 == n - d);
    let cond = complementary && same_group;
    if v.measure_equal && !cond {
        v.note("equal measures from a binomial coincidence without matching degree, d and subgroup");
    } else {
        v.note("equal measures <=> equal degree, d' in {d, deg-d} and <[A]> = <[A']>");
    }
    let direct = same_deg && d2 == d && a.class() == a2.class();
    let dual = same_deg && d2 == n - d && *a2.class() == a.class().neg();
    if direct {
        v.isomorphic = Tri::Yes;
        v.note("d' = d and A = A' give Gr(d;A) = Gr(d';A')");
    } else if dual {
        v.isomorphic = Tri::Yes;
        v.note("Gr(deg-d;A) = Gr(d;A^op) and [A'] = -[A]");
    } else if v.measure_equal {
        v.note("no direct or dual identification of the algebras: isomorphism undecided");
    }
    if d * (n - d) != d2 * (a2.degree() - d2) {
        v.birational = Tri::No;
        v.note("different dimensions, so not birational");
    }
    Ok(v.settle())
}

fn quadric_class(q: &QuadraticForm) -> Result<BrauerClass> {
    if q.dim() % 2 == 1 {
        clifford_odd(q)
    } else {
        clifford_even_half(q)
    }
}

/// Sound but possibly incomplete similarity test; `None` when undecided.
fn similar(q: &QuadraticForm, q2: &QuadraticForm) -> Result<Option<bool>> {
    if q.dim() != q2.dim() {
        return Ok(Some(false));
    }
    match q.field() {
        FieldDescriptor::Real => {
            let (n, a, b) = (q.dim(), q.negative_index(), q2.negative_index());
            Ok(Some(a == b || a == n - b))
        }
        FieldDescriptor::Rational => {
            if q.dim() % 2 == 1 {
                let c = q.determinant().mul(&q2.determinant());
                return Ok(Some(isometric_over_q(&q.scale(&c), q2)?));
            }
            let primes: Vec<u64> = bad_places(&[q, q2])
                .into_iter()
                .filter_map(|v| match v {
                    crate::field::Place::FinitePrime(p) => Some(p),
                    _ => None,
                })
                .take(SIMILARITY_SEARCH_PRIMES)
                .collect();
            for mask in 0u64..(1 << (primes.len() + 1)) {
                let n = if mask & 1 == 1 { -1i64 } else { 1 };
                let mut c = SquareClass::from_int(n, q.field())?;
                for (i, &p) in primes.iter().enumerate() {
                    if mask >> (i + 1) & 1 == 1 {
                        c = c.mul(&SquareClass::from_int(p as i64, q.field())?);
                    }
                }
                if isometric_over_q(&q.scale(&c), q2)? {
                    return Ok(Some(true));
                }
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

pub fn compare_quadrics(q: &QuadraticForm, q2: &QuadraticForm) -> Result<Verdict> {
    let v1 = TwistedVariety::quadric(q.clone())?;
    let v2 = TwistedVariety::quadric(q2.clone())?;
    let (mut v, _, _) = base(&v1, &v2)?;
    let same_dim = q.dim() == q2.dim();
    let cond = same_dim && quadric_class(q)? == quadric_class(q2)?;
    if v.measure_equal && !cond {
        v.note("equal measures from a coincidence of split parts across dimensions");
    } else {
        v.note("equal measures <=> equal dimension and equal even Clifford class");
    }
    if !cond {
        v.isomorphic = Tri::No;
        v.note("isomorphic quadrics have similar forms, hence equal dimension and Clifford class");
    } else if q.dim() == 3 || q.dim() == 6 {
        v.isomorphic = Tri::Yes;
        v.note(format!(
            "in dimension {} the even Clifford class determines the form up to similarity",
            q.dim()
        ));
    } else {
        match similar(q, q2)? {
            Some(true) => {
                v.isomorphic = Tri::Yes;
                v.note("forms are similar, so the quadrics are isomorphic");
            }
            Some(false) => {
                v.isomorphic = Tri::No;
                v.note("forms are not similar, so the quadrics are not isomorphic");
            }
            None => v.note("similarity of the forms is undecided"),
        }
    }
    if !same_dim {
        v.birational = Tri::No;
        v.note("different dimensions, so not birational");
    }
    Ok(v.settle())
}

pub fn compare_hp(a: &Csa, a2: &Csa) -> Result<Verdict> {
    let v1 = TwistedVariety::quaternion_projective(a.clone())?;
    let v2 = TwistedVariety::quaternion_projective(a2.clone())?;
    let (mut v, _, _) = base(&v1, &v2)?;
    let cond = a.degree() == a2.degree() && a.class() == a2.class();
    if v.measure_equal && !cond {
        v.note("equal measures in degree 2, where the measure is [k] for every algebra");
    } else {
        v.note("equal measures <=> equal degree and A = A'");
    }
    if !cond {
        v.isomorphic = Tri::No;
        v.note("isomorphic varieties force (A,*) = (A',*'), in particular A = A'");
    } else {
        v.note("A = A' does not determine the symplectic involution, isomorphism undecided");
    }
    if a.degree() != a2.degree() {
        v.birational = Tri::No;
        v.note("different dimensions, so not birational");
    }
    Ok(v.settle())
}

pub fn compare_involution(x: &TwistedVariety, y: &TwistedVariety) -> Result<Verdict> {
    let (
        TwistedVariety::Involution {
            algebra: a,
            c_plus: p1,
            c_minus: m1,
        },
        TwistedVariety::Involution {
            algebra: a2,
            c_plus: p2,
            c_minus: m2,
        },
    ) = (x, y)
    else {
        return Err(Error::domain("compare_involution needs two involution varieties"));
    };
    let (mut v, _, _) = base(x, y)?;
    let same_deg = a.degree() == a2.degree();
    let cond = same_deg && ((p1 == p2 && m1 == m2) || (p1 == m2 && m1 == p2));
    let division = (a.degree() == 4 && a.index() == 4) || (a2.degree() == 4 && a2.index() == 4);
    if v.measure_equal {
        if cond {
            v.note("equal degree and Clifford pair (up to swap) => equal measures");
        } else if same_deg && a.degree() == 4 && !division {
            v.note("degree 4 without division algebra: equal measures do not determine the Clifford pair");
        } else {
            v.note("equal measures without equal Clifford pairs");
        }
    } else {
        v.note("equal degree and Clifford pair (up to swap) => equal measures");
    }
    if !cond {
        v.isomorphic = Tri::No;
        v.note("isomorphic involution varieties have isomorphic algebras with involution, hence equal Clifford pairs");
    } else if a.degree() == 4 || a.degree() == 6 {
        v.isomorphic = Tri::Yes;
        v.note(format!(
            "in degree {} the Clifford pair determines (A,*), hence Iv(A,*)",
            a.degree()
        ));
    } else {
        v.note("equal Clifford pairs do not determine (A,*) in this degree");
    }
    if !same_deg {
        v.birational = Tri::No;
        v.note("different dimensions, so not birational");
    }
    Ok(v.settle())
}

fn require_albert_domain(q: &QuadraticForm) -> Result<()> {
    if q.dim() != 6 || !q.has_trivial_discriminant() {
        return Err(Error::domain(format!(
            "products of quadrics need dimension-6 forms with trivial discriminant, got dim {} disc {}",
            q.dim(),
            q.discriminant()
        )));
    }
    Ok(())
}

pub fn compare_product_quadrics(
    q: &QuadraticForm,
    q1: &QuadraticForm,
    q2: &QuadraticForm,
    q3: &QuadraticForm,
) -> Result<Verdict> {
    for f in [q, q1, q2, q3] {
        require_albert_domain(f)?;
    }
    let prod = |a: &QuadraticForm, b: &QuadraticForm| -> Result<TwistedVariety> {
        TwistedVariety::product(vec![
            TwistedVariety::quadric(a.clone())?,
            TwistedVariety::quadric(b.clone())?,
        ])
    };
    let (mut v, _, _) = base(&prod(q, q1)?, &prod(q2, q3)?)?;
    let c = [q, q1, q2, q3]
        .iter()
        .map(|f| clifford_even_half(f))
        .collect::<Result<Vec<_>>>()?;
    let case = match (c[0].is_zero(), c[1].is_zero()) {
        (true, true) => "both Clifford classes trivial",
        (false, true) | (true, false) => "exactly one Clifford class trivial",
        _ if c[0] == c[1] => "equal nontrivial Clifford classes",
        _ => "distinct nontrivial Clifford classes",
    };
    v.note(format!("case analysis on the first product: {case}"));
    if v.measure_equal {
        if c[0] == c[2] && c[1] == c[3] {
            v.matches.push("Q1 = Q3".into());
            v.matches.push("Q2 = Q4".into());
        } else if c[0] == c[3] && c[1] == c[2] {
            v.matches.push("Q1 = Q4".into());
            v.matches.push("Q2 = Q3".into());
        }
        v.isomorphic = Tri::Yes;
        v.note("equal measures => matching Clifford classes up to swap => isomorphic products");
    } else {
        v.isomorphic = Tri::No;
    }
    Ok(v.settle())
}

fn require_period_two(a: &Csa) -> Result<()> {
    if a.period() > 2 {
        return Err(Error::domain(format!(
            "product comparison needs period <= 2, got {}",
            a.period()
        )));
    }
    Ok(())
}

/// Factor pairs `(i, j)` with left factor `i` isomorphic to right factor `j`.
fn factor_matches(
    left: &[TwistedVariety; 2],
    right: &[TwistedVariety; 2],
    iso: impl Fn(&TwistedVariety, &TwistedVariety) -> bool,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, x) in left.iter().enumerate() {
        for (j, y) in right.iter().enumerate() {
            if iso(x, y) {
                out.push((i, j));
            }
        }
    }
    out
}

fn product_verdict(
    left: [TwistedVariety; 2],
    right: [TwistedVariety; 2],
    subgroup: (Vec<BrauerClass>, Vec<BrauerClass>),
    iso: impl Fn(&TwistedVariety, &TwistedVariety) -> bool,
    dims: (u64, u64),
) -> Result<Verdict> {
    let field = left[0].field();
    let (mut v, _, _) = base(
        &TwistedVariety::product(left.to_vec())?,
        &TwistedVariety::product(right.to_vec())?,
    )?;
    let g1 = subgroup_generated(&field, &subgroup.0)?;
    let g2 = subgroup_generated(&field, &subgroup.1)?;
    v.subgroup_equal = Some(g1 == g2);
    let names = [["X1", "X2"], ["X3", "X4"]];
    let pairs = factor_matches(&left, &right, &iso);
    if v.measure_equal {
        for &(i, j) in &pairs {
            v.matches.push(format!("{} = {}", names[0][i], names[1][j]));
        }
        if pairs.is_empty() {
            v.note("equal measures but no factor match found");
        } else {
            v.note("equal measures => some factor on the left is isomorphic to a factor on the right");
        }
    }
    let full = (pairs.contains(&(0, 0)) && pairs.contains(&(1, 1)))
        || (pairs.contains(&(0, 1)) && pairs.contains(&(1, 0)));
    if full {
        v.isomorphic = Tri::Yes;
        v.note("factors match pairwise, so the products are isomorphic");
    }
    if dims.0 != dims.1 {
        v.birational = Tri::No;
        v.note("different dimensions, so not birational");
    }
    Ok(v.settle())
}

pub fn compare_product_sb(a: &Csa, a1: &Csa, a2: &Csa, a3: &Csa) -> Result<Verdict> {
    for x in [a, a1, a2, a3] {
        require_period_two(x)?;
    }
    if a.degree() != a1.degree() || a2.degree() != a3.degree() {
        return Err(Error::domain("product comparison needs deg(A)=deg(A') and deg(A'')=deg(A''')"));
    }
    let sb = |x: &Csa| TwistedVariety::SeveriBrauer(x.clone());
    let iso = |x: &TwistedVariety, y: &TwistedVariety| match (x, y) {
        (TwistedVariety::SeveriBrauer(p), TwistedVariety::SeveriBrauer(q)) => p == q,
        _ => false,
    };
    product_verdict(
        [sb(a), sb(a1)],
        [sb(a2), sb(a3)],
        (
            vec![a.class().clone(), a1.class().clone()],
            vec![a2.class().clone(), a3.class().clone()],
        ),
        iso,
        (2 * (a.degree() - 1), 2 * (a2.degree() - 1)),
    )
}

pub fn compare_product_gr(d: u64, a: &Csa, a1: &Csa, d2: u64, a2: &Csa, a3: &Csa) -> Result<Verdict> {
    for x in [a, a1, a2, a3] {
        require_period_two(x)?;
    }
    if a.degree() != a1.degree() || a2.degree() != a3.degree() {
        return Err(Error::domain("product comparison needs deg(A)=deg(A') and deg(A'')=deg(A''')"));
    }
    let gr = |d: u64, x: &Csa| TwistedVariety::grassmannian(d, x.clone());
    let left = [gr(d, a)?, gr(d, a1)?];
    let right = [gr(d2, a2)?, gr(d2, a3)?];
    let iso = |x: &TwistedVariety, y: &TwistedVariety| match (x, y) {
        (
            TwistedVariety::Grassmannian { d: dx, algebra: p },
            TwistedVariety::Grassmannian { d: dy, algebra: q },
        ) => {
            let n = p.degree();
            n == q.degree() && (dx == dy || *dy == n - dx) && p.class() == q.class()
        }
        _ => false,
    };
    let dims = (
        2 * d * (a.degree() - d),
        2 * d2 * (a2.degree() - d2),
    );
    let mut v = product_verdict(left, right, (
        vec![a.class().clone(), a1.class().clone()],
        vec![a2.class().clone(), a3.class().clone()],
    ), iso, dims)?;
    if !v.count_equal {
        v.chain.insert(1, "binomial counts differ".into());
    }
    Ok(v)
}

/// The data of a product of two conics `C(a₁,b₁) × C(a₂,b₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicPair {
    pub first: BrauerClass,
    pub second: BrauerClass,
    /// The Albert form of `(a₁,b₁) ⊗ (a₂,b₂)`, when square classes are available.
    pub albert: Option<QuadraticForm>,
}

impl ConicPair {
    pub fn from_square_classes(
        a1: &SquareClass,
        b1: &SquareClass,
        a2: &SquareClass,
        b2: &SquareClass,
        field: &FieldDescriptor,
    ) -> Result<Self> {
        Ok(ConicPair {
            first: quaternion_class(a1, b1, field)?,
            second: quaternion_class(a2, b2, field)?,
            albert: Some(albert(a1, b1, a2, b2, field)?),
        })
    }

    /// Declared quaternion classes, for backends without square classes.
    pub fn from_classes(first: BrauerClass, second: BrauerClass) -> Result<Self> {
        for c in [&first, &second] {
            Csa::new(c.clone(), 2).map_err(|_| {
                Error::domain(format!("{} is not the class of a quaternion algebra", c.to_json()))
            })?;
        }
        same_field(&first.field(), &second.field())?;
        Ok(ConicPair {
            first,
            second,
            albert: None,
        })
    }

    fn variety(&self) -> Result<TwistedVariety> {
        TwistedVariety::product(vec![
            TwistedVariety::SeveriBrauer(Csa::new(self.first.clone(), 2)?),
            TwistedVariety::SeveriBrauer(Csa::new(self.second.clone(), 2)?),
        ])
    }

    /// Whether `(a₁,b₁) ⊗ (a₂,b₂)` is a division algebra, i.e. the Albert form is
    /// anisotropic. `None` when undecidable on this backend.
    pub fn is_division(&self) -> Result<Option<bool>> {
        if let Some(q) = &self.albert {
            match q.field() {
                FieldDescriptor::Rational => return Ok(Some(anisotropic_over_q(q)?)),
                FieldDescriptor::Real => return Ok(Some(q.is_definite())),
                _ => {}
            }
        }
        let a = Csa::new(self.first.add(&self.second)?, 4)?;
        Ok(Some(a.index() == 4))
    }
}

pub fn kollar_products(left: &ConicPair, right: &ConicPair) -> Result<Verdict> {
    let (mut v, _, _) = base(&left.variety()?, &right.variety()?)?;
    let field = left.first.field();
    let g1 = subgroup_generated(&field, &[left.first.clone(), left.second.clone()])?;
    let g2 = subgroup_generated(&field, &[right.first.clone(), right.second.clone()])?;
    let same = g1 == g2;
    v.subgroup_equal = Some(same);
    if same && v.measure_equal {
        v.birational = Tri::Yes;
        v.note("equal generated subgroups <=> equal Grothendieck classes <=> birational products of conics");
    } else if !same {
        v.stably_birational = Tri::No;
        v.note("stably birational varieties have equal kernels Br(k) -> Br(k(X)), here the generated subgroups");
    }
    if v.measure_equal {
        let swap = (left.first == right.first && left.second == right.second)
            || (left.first == right.second && left.second == right.first);
        if swap {
            v.isomorphic = Tri::Yes;
            v.note("conic factors match up to order");
        } else if left.is_division()? == Some(true) || right.is_division()? == Some(true) {
            v.isomorphic = Tri::Yes;
            v.note("Albert form anisotropic (division biquaternion algebra): equal classes => isomorphic");
        } else {
            v.note("Albert forms isotropic: isomorphism undecided");
        }
    }
    Ok(v.settle())
}

/// Dispatches on matching single-variety families.
pub fn compare(x: &TwistedVariety, y: &TwistedVariety) -> Result<Verdict> {
    use TwistedVariety as V;
    match (x, y) {
        (V::SeveriBrauer(a), V::SeveriBrauer(b)) => compare_sb(a, b),
        (V::Grassmannian { d, algebra: a }, V::Grassmannian { d: e, algebra: b }) => {
            compare_gr(*d, a, *e, b)
        }
        (V::Quadric(q), V::Quadric(r)) => compare_quadrics(q, r),
        (V::QuaternionProjective(a), V::QuaternionProjective(b)) => compare_hp(a, b),
        (V::Involution { .. }, V::Involution { .. }) => compare_involution(x, y),
        _ => Err(Error::domain("compare needs two varieties of the same family")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::{quaternion, tensor};
    use crate::field::Place;
    use crate::measure::{involution_from_biquaternion, involution_from_form};
    use std::sync::Arc;

    const Q: FieldDescriptor = FieldDescriptor::Rational;

    fn sq(n: i64) -> SquareClass {
        SquareClass::from_int(n, &Q).unwrap()
    }

    fn quat(a: i64, b: i64) -> Csa {
        quaternion(&sq(a), &sq(b), &Q).unwrap()
    }

    fn alb(a1: i64, b1: i64, a2: i64, b2: i64) -> QuadraticForm {
        albert(&sq(a1), &sq(b1), &sq(a2), &sq(b2), &Q).unwrap()
    }

    fn form(c: &[i64]) -> QuadraticForm {
        QuadraticForm::from_ints(c, &Q).unwrap()
    }

    fn order3() -> BrauerClass {
        BrauerClass::rational([
            (Place::FinitePrime(3), "1/3".parse().unwrap()),
            (Place::FinitePrime(7), "2/3".parse().unwrap()),
        ])
        .unwrap()
    }

    fn ok(v: &Verdict) {
        v.check_invariants().unwrap();
    }

    #[test]
    fn sb_examples() {
        let a = quat(-1, 3);
        let v = compare_sb(&a, &a).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!((v.isomorphic, v.birational, v.stably_birational), (Tri::Yes, Tri::Yes, Tri::Yes));

        let r = FieldDescriptor::Real;
        let h = quaternion(&SquareClass::minus_one(), &SquareClass::minus_one(), &r).unwrap();
        let v = compare_sb(&h, &Csa::split(&r, 2).unwrap()).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
        assert_eq!(v.isomorphic, Tri::No);

        let v = compare_sb(&quat(-1, 3), &quat(-1, 7)).unwrap();
        ok(&v);
        assert!(!v.measure_equal);

        let c = order3();
        let x = Csa::new(c.clone(), 3).unwrap();
        let y = Csa::new(c.scale(2), 3).unwrap();
        let v = compare_sb(&x, &y).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.birational, Tri::Yes);
        assert_eq!(v.isomorphic, Tri::Unknown);

        let err = compare_sb(&a, &h).unwrap_err();
        assert!(matches!(err, Error::BackendMismatch(..)));
    }

    #[test]
    fn sb_period_list_over_declared_group() {
        let g = Arc::new(
            crate::field::AbstractTorsion::new(vec![("x".into(), 7), ("y".into(), 5)], vec![], vec![]).unwrap(),
        );
        let x = BrauerClass::abstract_torsion(&g, &[1, 0]).unwrap();
        let v = compare_sb(&Csa::new(x.clone(), 7).unwrap(), &Csa::new(x.scale(3), 7).unwrap()).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.birational, Tri::Unknown);
        let y = BrauerClass::abstract_torsion(&g, &[0, 1]).unwrap();
        let odd = compare_sb(&Csa::new(y.clone(), 5).unwrap(), &Csa::new(y.scale(2), 5).unwrap()).unwrap();
        assert_eq!(odd.birational, Tri::Unknown);
        let even = compare_sb(&Csa::new(y.clone(), 10).unwrap(), &Csa::new(y.scale(2), 10).unwrap()).unwrap();
        assert_eq!(even.birational, Tri::Yes);
    }

    #[test]
    fn gr_examples() {
        let a = tensor(&quat(-1, 3), &Csa::split(&Q, 3).unwrap()).unwrap();
        let v = compare_gr(2, &a, 4, &a).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Yes);

        let v1 = compare_gr(1, &quat(-1, 3), 1, &quat(-1, 7)).unwrap();
        let v2 = compare_sb(&quat(-1, 3), &quat(-1, 7)).unwrap();
        assert_eq!(v1.measure_equal, v2.measure_equal);
        assert_eq!(v1.isomorphic, v2.isomorphic);

        let b = tensor(&quat(-1, 7), &Csa::split(&Q, 3).unwrap()).unwrap();
        let v = compare_gr(2, &a, 2, &b).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
        assert_eq!(v.subgroup_equal, Some(false));

        let c = order3();
        let x = Csa::new(c.clone(), 3).unwrap();
        let v = compare_gr(1, &x, 2, &x).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Unknown);
        let y = Csa::new(c.scale(2), 3).unwrap();
        assert_eq!(compare_gr(1, &x, 2, &y).unwrap().isomorphic, Tri::Yes);
    }

    #[test]
    fn binomial_coincidence_is_reported_honestly() {
        let v = compare_gr(
            2,
            &Csa::split(&Q, 16).unwrap(),
            3,
            &Csa::split(&Q, 10).unwrap(),
        )
        .unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::No);
        assert_eq!(v.birational, Tri::No);
    }

    #[test]
    fn quadric_examples() {
        let q = alb(1, 1, -1, 3);
        let v = compare_quadrics(&q, &q).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);

        let fam = |p: i64| form(&[1, 1, -1, 1, -p, -p]);
        let v = compare_quadrics(&fam(3), &fam(7)).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
        assert_eq!(v.birational, Tri::Unknown);

        let f1 = crate::qform::quaternion_sum_form(&[(sq(-1), sq(3)), (sq(-1), sq(7))], &Q).unwrap();
        let f2 = crate::qform::quaternion_sum_form(&[(sq(-1), sq(3)), (sq(-1), sq(11))], &Q).unwrap();
        let v = compare_quadrics(&f1, &f2).unwrap();
        ok(&v);
        assert!(!v.measure_equal);

        let v = compare_quadrics(&f1, &f1.scale(&sq(5))).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);

        let split7 = form(&[1, -1, 1, -1, 1, -1, 1]);
        let split6 = form(&[1, -1, 1, -1, 1, -1]);
        let v = compare_quadrics(&split7, &split6).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::No);
    }

    #[test]
    fn hp_examples() {
        let a = Csa::new(quat(-1, 3).class().clone(), 4).unwrap();
        let v = compare_hp(&a, &a).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Unknown);
        let v = compare_hp(&Csa::split(&Q, 4).unwrap(), &a).unwrap();
        assert!(!v.measure_equal);
        let b6 = Csa::new(a.class().clone(), 6).unwrap();
        let b8 = Csa::new(a.class().clone(), 8).unwrap();
        let v = compare_hp(&b6, &b8).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
        assert!(!v.count_equal);
    }

    #[test]
    fn involution_examples() {
        let iv = involution_from_biquaternion(&sq(-1), &sq(3), &sq(-1), &sq(7), &Q).unwrap();
        let v = compare_involution(&iv, &iv).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);

        let fam = |p: i64| involution_from_form(&form(&[1, 1, -1, 1, -p, -p])).unwrap();
        let v = compare_involution(&fam(3), &fam(7)).unwrap();
        ok(&v);
        assert!(!v.measure_equal);

        let swapped = involution_from_biquaternion(&sq(-1), &sq(7), &sq(-1), &sq(3), &Q).unwrap();
        let v = compare_involution(&iv, &swapped).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Yes);
    }

    #[test]
    fn product_quadric_examples() {
        let (a, b, c) = (alb(1, 1, -1, 3), alb(1, 1, -1, 7), alb(1, 1, -1, 11));
        let v = compare_product_quadrics(&a, &b, &a, &b).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);
        let v = compare_product_quadrics(&a, &b, &b, &a).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);
        assert!(v.matches.contains(&"Q1 = Q4".to_string()));
        let v = compare_product_quadrics(&a, &b, &a, &c).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
    }

    #[test]
    fn product_sb_examples() {
        let (x, y) = (quat(-1, 3), quat(-1, 7));
        let split = Csa::split(&Q, 2).unwrap();
        let v = compare_product_sb(&x, &y, &x, &y).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);
        let v = compare_product_sb(&x, &y, &y, &x).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert!(v.matches.contains(&"X1 = X4".to_string()));
        let v = compare_product_sb(&x, &split, &y, &split).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
    }

    #[test]
    fn product_gr_examples() {
        let x = tensor(&quat(-1, 3), &Csa::split(&Q, 2).unwrap()).unwrap();
        let y = tensor(&quat(-1, 7), &Csa::split(&Q, 2).unwrap()).unwrap();
        let v = compare_product_gr(2, &x, &y, 2, &x, &y).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);
        let v = compare_product_gr(1, &x, &y, 2, &x, &y).unwrap();
        ok(&v);
        assert!(!v.measure_equal);
        assert!(!v.count_equal);
        let v = compare_product_gr(1, &x, &y, 3, &y, &x).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert!(!v.matches.is_empty());
    }

    #[test]
    fn kollar_examples() {
        let p = ConicPair::from_square_classes(&sq(-1), &sq(3), &sq(-1), &sq(7), &Q).unwrap();
        let v = kollar_products(&p, &p).unwrap();
        ok(&v);
        assert_eq!(v.isomorphic, Tri::Yes);
        let swapped = ConicPair::from_square_classes(&sq(-1), &sq(7), &sq(-1), &sq(3), &Q).unwrap();
        let v = kollar_products(&p, &swapped).unwrap();
        ok(&v);
        assert_eq!(v.subgroup_equal, Some(true));
        assert_eq!(v.birational, Tri::Yes);
        let other = ConicPair::from_square_classes(&sq(-1), &sq(3), &sq(-1), &sq(3).mul(&sq(7)), &Q).unwrap();
        let v = kollar_products(&p, &other).unwrap();
        ok(&v);
        assert_eq!(v.subgroup_equal, Some(true));
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Unknown);
        assert_eq!(p.is_division().unwrap(), Some(false));
    }

    #[test]
    fn kollar_with_declared_division_algebra() {
        let g = Arc::new(
            crate::field::AbstractTorsion::new(
                vec![("x".into(), 2), ("y".into(), 2)],
                vec![],
                vec![(vec![1, 1], 4)],
            )
            .unwrap(),
        );
        let x = BrauerClass::abstract_torsion(&g, &[1, 0]).unwrap();
        let y = BrauerClass::abstract_torsion(&g, &[0, 1]).unwrap();
        let xy = x.add(&y).unwrap();
        assert!(ConicPair::from_classes(x.clone(), xy).is_err());
        let left = ConicPair::from_classes(x.clone(), y.clone()).unwrap();
        let right = ConicPair::from_classes(y.clone(), x.clone()).unwrap();
        assert_eq!(left.is_division().unwrap(), Some(true));
        let v = kollar_products(&left, &right).unwrap();
        ok(&v);
        assert!(v.measure_equal);
        assert_eq!(v.isomorphic, Tri::Yes);
        let v = kollar_products(&left, &ConicPair::from_classes(x.clone(), x.clone()).unwrap()).unwrap();
        ok(&v);
        assert_eq!(v.birational, Tri::No);
    }
}
