//! Hermitian Gram matrices over F_v = Q_p(δ), stored exactly as a + b·δ with
//! rational a, b. The local model (value of δ²) lives in `LocalQuadExt`.

use crate::arith::{is_p_integral, parse_rat, rat, rat_to_string, val_rat, Rat};
use crate::error::{Error, Result};
use crate::field_data::{classify_prime, Discriminant, LocalQuadExt, Splitting};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub a: Rat,
    pub b: Rat,
}

impl FieldElement {
    pub fn new(a: Rat, b: Rat) -> Self {
        FieldElement { a, b }
    }

    pub fn from_rat(a: Rat) -> Self {
        FieldElement { a, b: Rat::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::from_rat(rat(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// The generator δ itself.
    pub fn delta() -> Self {
        FieldElement { a: Rat::zero(), b: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElement { a: self.a.clone(), b: -&self.b }
    }

    pub fn add(&self, o: &Self) -> Self {
        FieldElement { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FieldElement { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        FieldElement { a: -&self.a, b: -&self.b }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        FieldElement { a: &self.a * r, b: &self.b * r }
    }

    /// Product with δ² = `d`.
    pub fn mul(&self, o: &Self, d: i64) -> Self {
        let d = rat(d);
        FieldElement {
            a: &self.a * &o.a + &d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn trace(&self) -> Rat {
        &self.a + &self.a
    }

    pub fn norm(&self, d: i64) -> Rat {
        &self.a * &self.a - rat(d) * &self.b * &self.b
    }

    /// Inverse when the norm is nonzero (always for a field; for split models
    /// elements with a = ±b are zero divisors).
    pub fn inv(&self, d: i64) -> Option<Self> {
        let n = self.norm(d);
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&(Rat::one() / n)))
    }

    /// For split models: the image (a+b, a−b) in Q_p × Q_p.
    pub fn split_components(&self) -> (Rat, Rat) {
        (&self.a + &self.b, &self.a - &self.b)
    }

    /// Coordinates in a Z_p-basis {1, θ} of the local ring of integers:
    /// θ = δ (inert odd, ramified), θ = ω (inert p = 2), idempotent pair (split).
    pub fn ring_coords(&self, ext: &LocalQuadExt) -> (Rat, Rat) {
        match ext.splitting {
            Splitting::Split => self.split_components(),
            Splitting::Inert if ext.p == 2 => (&self.a + &self.b, &self.b + &self.b),
            _ => (self.a.clone(), self.b.clone()),
        }
    }

    pub fn is_integral(&self, ext: &LocalQuadExt) -> bool {
        let (x, y) = self.ring_coords(ext);
        is_p_integral(&x, ext.p) && is_p_integral(&y, ext.p)
    }

    pub fn to_strings(&self) -> [String; 2] {
        [rat_to_string(&self.a), rat_to_string(&self.b)]
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}·δ", self.b),
            _ => write!(f, "{}+{}·δ", self.a, self.b),
        }
    }
}

/// An n×n Hermitian matrix over the local field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    pub ext: LocalQuadExt,
    entries: Vec<Vec<FieldElement>>,
}

impl GramMatrix {
    pub fn new(ext: LocalQuadExt, entries: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotHermitian(format!("row {i} has length {}", row.len())));
            }
        }
        for i in 0..n {
            for j in 0..=i {
                if entries[i][j] != entries[j][i].conj() {
                    return Err(Error::NotHermitian(format!(
                        "entry ({i},{j}) is not the conjugate of ({j},{i})"
                    )));
                }
            }
        }
        Ok(GramMatrix { ext, entries })
    }

    pub fn diagonal(ext: LocalQuadExt, diag: &[Rat]) -> Self {
        let n = diag.len();
        let mut e = vec![vec![FieldElement::zero(); n]; n];
        for (i, d) in diag.iter().enumerate() {
            e[i][i] = FieldElement::from_rat(d.clone());
        }
        GramMatrix { ext, entries: e }
    }

    pub fn diagonal_int(ext: LocalQuadExt, diag: &[i64]) -> Self {
        Self::diagonal(ext, &diag.iter().map(|&d| rat(d)).collect::<Vec<_>>())
    }

    pub fn empty(ext: LocalQuadExt) -> Self {
        GramMatrix { ext, entries: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<FieldElement>] {
        &self.entries
    }

    /// Determinant (a rational, by conjugate symmetry).
    pub fn det(&self) -> Rat {
        let d = self.ext.delta_sq;
        match self.ext.splitting {
            Splitting::Split => {
                // det = (det A₁, det A₂) with A₂ = A₁ᵀ, so both agree
                let a: Vec<Vec<Rat>> = self
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|x| x.split_components().0).collect())
                    .collect();
                rational_det(a)
            }
            _ => field_det(self.entries.clone(), d).a,
        }
    }

    pub fn is_nonsingular(&self) -> bool {
        !self.det().is_zero()
    }

    /// Membership in Herm*(O): integral diagonal, off-diagonal in 𝔡⁻¹O.
    pub fn in_dual_star(&self) -> bool {
        let n = self.rank();
        let pi = FieldElement::delta();
        for i in 0..n {
            for j in 0..n {
                let x = &self.entries[i][j];
                let ok = if i == j {
                    x.is_rational() && is_p_integral(&x.a, self.ext.p)
                } else if self.ext.is_ramified() {
                    x.mul(&pi, self.ext.delta_sq).is_integral(&self.ext)
                } else {
                    x.is_integral(&self.ext)
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Self-dual for the trace pairing: in Herm* with 𝔡·S invertible over O.
    pub fn is_self_dual(&self) -> bool {
        if !self.in_dual_star() {
            return false;
        }
        let v = match val_rat(&self.det(), self.ext.p) {
            Some(v) => v,
            None => return false,
        };
        if self.ext.is_ramified() {
            2 * v + self.rank() as i64 == 0
        } else {
            v == 0
        }
    }

    /// ḡᵀ·self·g for an n×n matrix g over the field.
    pub fn transform(&self, g: &[Vec<FieldElement>]) -> Result<GramMatrix> {
        let n = self.rank();
        let m = g.first().map_or(0, |r| r.len());
        if g.len() != n {
            return Err(Error::InvalidInput("transform has wrong shape".into()));
        }
        let d = self.ext.delta_sq;
        let mut sg = vec![vec![FieldElement::zero(); m]; n];
        for i in 0..n {
            for j in 0..m {
                let mut acc = FieldElement::zero();
                for l in 0..n {
                    acc = acc.add(&self.entries[i][l].mul(&g[l][j], d));
                }
                sg[i][j] = acc;
            }
        }
        let mut out = vec![vec![FieldElement::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = FieldElement::zero();
                for l in 0..n {
                    acc = acc.add(&g[l][i].conj().mul(&sg[l][j], d));
                }
                out[i][j] = acc;
            }
        }
        GramMatrix::new(self.ext, out)
    }

    pub fn to_json(&self) -> GramJson {
        GramJson {
            p: self.ext.p,
            splitting: self.ext.splitting.name().to_string(),
            c: self.ext.ramified_unit(),
            delta: None,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| x.to_strings()).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &GramJson) -> Result<GramMatrix> {
        let splitting = Splitting::parse(&j.splitting)?;
        let ext = match (j.delta, j.c) {
            (Some(d), _) => {
                let e = classify_prime(Discriminant::new(d)?, j.p)?;
                if e.splitting != splitting {
                    return Err(Error::ContextMismatch(format!(
                        "Δ = {d} is {} at {}, not {}",
                        e.splitting.name(),
                        j.p,
                        splitting.name()
                    )));
                }
                e
            }
            (None, Some(c)) if splitting == Splitting::Ramified => LocalQuadExt::ramified(j.p, c)?,
            _ => LocalQuadExt::new(j.p, splitting)?,
        };
        let entries = j
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|[a, b]| {
                        let a = parse_rat(a).ok_or_else(|| Error::InvalidInput(format!("bad rational {a:?}")))?;
                        let b = parse_rat(b).ok_or_else(|| Error::InvalidInput(format!("bad rational {b:?}")))?;
                        Ok(FieldElement::new(a, b))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GramMatrix::new(ext, entries)
    }
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Serialized Gram matrix: entries are [a, b] pairs of rational strings for
/// a + b·δ. `c` fixes π² = c·p for ramified models, `delta` derives the model
/// from a global discriminant.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GramJson {
    #[serde(with = "int_string")]
    pub p: u64,
    pub splitting: String,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "int_string::opt")]
    pub c: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "int_string::opt")]
    pub delta: Option<i64>,
    pub entries: Vec<Vec<[String; 2]>>,
}

/// Integers written as JSON strings; plain JSON numbers are accepted on input.
mod int_string {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(i64),
        Str(String),
    }

    fn parse<T: FromStr, E: serde::de::Error>(r: Raw) -> Result<T, E> {
        let s = match r {
            Raw::Num(n) => n.to_string(),
            Raw::Str(s) => s,
        };
        s.trim().parse().map_err(|_| E::custom(format!("not an integer: {s:?}")))
    }

    pub fn serialize<T: ToString, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        parse(Raw::deserialize(d)?)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<T: ToString, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_str(&x.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<Option<T>, D::Error> {
            Option::<Raw>::deserialize(d)?.map(parse::<T, D::Error>).transpose()
        }
    }
}

fn rational_det(mut a: Vec<Vec<Rat>>) -> Rat {
    let n = a.len();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rat::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        let pv = a[c][c].clone();
        det *= &pv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn field_det(mut a: Vec<Vec<FieldElement>>, d: i64) -> FieldElement {
    let n = a.len();
    let mut det = FieldElement::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return FieldElement::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = det.neg();
        }
        let pv = a[c][c].clone();
        det = det.mul(&pv, d);
        let inv = pv.inv(d).expect("nonzero element of a field is invertible");
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].mul(&inv, d);
            for k in c..n {
                let t = f.mul(&a[c][k], d);
                a[r][k] = a[r][k].sub(&t);
            }
        }
    }
    det
}

/// The self-dual hyperbolic plane M°₂ = [[0, 𝔡⁻¹], [conj(𝔡)⁻¹, 0]].
pub fn standard_hyperbolic(ext: LocalQuadExt) -> GramMatrix {
    let off = if ext.is_ramified() {
        FieldElement::delta().inv(ext.delta_sq).expect("π is invertible")
    } else {
        FieldElement::one()
    };
    GramMatrix {
        ext,
        entries: vec![
            vec![FieldElement::zero(), off.clone()],
            vec![off.conj(), FieldElement::zero()],
        ],
    }
}

/// The rank-one lattice ⟨1⟩; only meaningful over unramified extensions.
pub fn unit_rank_one(ext: LocalQuadExt) -> Result<GramMatrix> {
    if ext.is_ramified() {
        return Err(Error::RamifiedUnsupported);
    }
    Ok(GramMatrix::diagonal_int(ext, &[1]))
}

pub fn direct_sum(a: &GramMatrix, b: &GramMatrix) -> Result<GramMatrix> {
    if a.ext != b.ext {
        return Err(Error::ContextMismatch(format!("{} vs {}", a.ext, b.ext)));
    }
    let (n, m) = (a.rank(), b.rank());
    let mut e = vec![vec![FieldElement::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            e[i][j] = a.entries[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            e[n + i][n + j] = b.entries[i][j].clone();
        }
    }
    Ok(GramMatrix { ext: a.ext, entries: e })
}

/// Gram matrix of a self-dual lattice of rank n: I_n when unramified,
/// (M°₂)^{n/2} when ramified (odd n has none).
pub fn standard_self_dual(ext: LocalQuadExt, n: usize) -> Option<GramMatrix> {
    if !ext.is_ramified() {
        return Some(GramMatrix::diagonal_int(ext, &vec![1; n]));
    }
    if n % 2 == 1 {
        return None;
    }
    let mut g = GramMatrix::empty(ext);
    for _ in 0..n / 2 {
        g = direct_sum(&g, &standard_hyperbolic(ext)).expect("same context");
    }
    Some(g)
}

/// An almost self-dual lattice of odd rank m over a ramified extension:
/// ⟨1⟩ ⊕ (M°₂)^{(m−1)/2}.
pub fn almost_self_dual(ext: LocalQuadExt, m: usize) -> GramMatrix {
    let mut g = GramMatrix::diagonal_int(ext, &[1]);
    for _ in 0..m / 2 {
        g = direct_sum(&g, &standard_hyperbolic(ext)).expect("same context");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn inert3() -> LocalQuadExt {
        LocalQuadExt::new(3, Splitting::Inert).unwrap()
    }
    fn ram7() -> LocalQuadExt {
        LocalQuadExt::new(7, Splitting::Ramified).unwrap()
    }

    #[test]
    fn self_duality() {
        let i3 = inert3();
        assert!(standard_self_dual(i3, 3).unwrap().is_self_dual());
        assert!(standard_hyperbolic(i3).is_self_dual());
        assert!(!GramMatrix::diagonal_int(i3, &[1, 3]).is_self_dual());
        assert!(standard_self_dual(ram7(), 4).unwrap().is_self_dual());
        assert!(!almost_self_dual(ram7(), 3).is_self_dual());
        assert!(!GramMatrix::diagonal_int(ram7(), &[1, 1]).is_self_dual());
    }

    #[test]
    fn hyperbolic_planes() {
        let h = standard_hyperbolic(inert3());
        assert_eq!(h.entry(0, 1), &FieldElement::one());
        assert_eq!(h.det(), rat(-1));
        assert!(h.in_dual_star());
        let r = standard_hyperbolic(ram7());
        // π⁻¹ = π/(c·p) with c = −1
        assert_eq!(r.entry(0, 1), &FieldElement::new(rat(0), ratio(-1, 7)));
        assert_eq!(r.entry(1, 0), &FieldElement::new(rat(0), ratio(1, 7)));
        assert!(r.in_dual_star());
        // det = π⁻² = 1/(c·p) has valuation −1
        assert_eq!(r.det(), ratio(-1, 7));
    }

    #[test]
    fn unit_lattice_and_sums() {
        assert!(unit_rank_one(ram7()).is_err());
        let one = unit_rank_one(inert3()).unwrap();
        let s = direct_sum(&one, &one).unwrap();
        assert_eq!(s, GramMatrix::diagonal_int(inert3(), &[1, 1]));
        let h = standard_hyperbolic(inert3());
        assert_eq!(direct_sum(&h, &h).unwrap().rank(), 4);
        let other = LocalQuadExt::new(5, Splitting::Inert).unwrap();
        assert!(direct_sum(&one, &unit_rank_one(other).unwrap()).is_err());
    }

    #[test]
    fn dual_star_membership() {
        assert!(GramMatrix::diagonal_int(inert3(), &[1, 3]).in_dual_star());
        assert!(!GramMatrix::diagonal(inert3(), &[ratio(1, 3)]).in_dual_star());
        // off-diagonal 1/7 ∉ π⁻¹O but π⁻¹ ∈ π⁻¹O
        let e = FieldElement::from_rat(ratio(1, 7));
        let m = GramMatrix::new(ram7(), vec![vec![FieldElement::zero(), e.clone()], vec![e, FieldElement::zero()]]).unwrap();
        assert!(!m.in_dual_star());
    }

    #[test]
    fn hermitian_check() {
        let x = FieldElement::new(rat(1), rat(1));
        assert!(GramMatrix::new(inert3(), vec![vec![FieldElement::one(), x.clone()], vec![x.clone(), FieldElement::one()]]).is_err());
        assert!(GramMatrix::new(inert3(), vec![vec![FieldElement::one(), x.clone()], vec![x.conj(), FieldElement::one()]]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let h = standard_hyperbolic(ram7());
        let j = h.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: GramJson = serde_json::from_str(&s).unwrap();
        assert_eq!(GramMatrix::from_json(&back).unwrap(), h);
        let txt = r#"{"p":3,"splitting":"inert","entries":[[["1","0"]]]}"#;
        let g = GramMatrix::from_json(&serde_json::from_str(txt).unwrap()).unwrap();
        assert_eq!(g, GramMatrix::diagonal_int(inert3(), &[1]));
    }

    #[test]
    fn inert_two_coordinates() {
        let e = LocalQuadExt::new(2, Splitting::Inert).unwrap();
        // δ = 2ω+1 is integral, δ/2 = ω + 1/2 is not
        assert!(FieldElement::delta().is_integral(&e));
        assert!(!FieldElement::new(rat(0), ratio(1, 2)).is_integral(&e));
        // ω = (δ−1)/2 is integral
        assert!(FieldElement::new(ratio(-1, 2), ratio(1, 2)).is_integral(&e));
    }
}
