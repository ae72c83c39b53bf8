//! Compiled BLS12-381 kernels for `tecash`.
//!
//! Group elements are exposed in multiplicative notation to match the
//! pure-Python backend: `*` is the group law, `**` exponentiates by an
//! integer scalar (reduced mod r), `/` multiplies by the inverse.

use ark_bls12_381::{g1, Bls12_381, Fq12, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_ff::{CyclotomicMultSubgroup, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use sha2::Sha256;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

const G1_LEN: usize = 48;
const G2_LEN: usize = 96;
const GT_LEN: usize = 576;

fn order() -> BigInt {
    BigInt::from_biguint(Sign::Plus, Fr::MODULUS.into())
}

fn to_fr(k: &BigInt) -> Fr {
    let reduced = k.mod_floor(&order());
    let (_, mag) = reduced.into_parts();
    Fr::from(mag)
}

fn hash_bytes(b: &[u8]) -> isize {
    let mut h = DefaultHasher::new();
    b.hash(&mut h);
    h.finish() as isize
}

fn ser<T: CanonicalSerialize>(x: &T, len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    x.serialize_compressed(&mut out).expect("serialization into Vec cannot fail");
    out
}

#[pyclass(frozen, module = "tecash._native")]
#[derive(Clone)]
pub struct G1 {
    p: G1Projective,
}

#[pyclass(frozen, module = "tecash._native")]
#[derive(Clone)]
pub struct G2 {
    p: G2Projective,
}

#[pyclass(frozen, module = "tecash._native")]
#[derive(Clone)]
pub struct GT {
    v: Fq12,
}

#[pymethods]
impl G1 {
    #[staticmethod]
    fn generator() -> Self {
        G1 { p: G1Projective::generator() }
    }

    #[staticmethod]
    fn identity() -> Self {
        G1 { p: G1Projective::zero() }
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        if data.len() != G1_LEN {
            return Err(PyValueError::new_err("G1 encoding must be 48 bytes"));
        }
        let a = G1Affine::deserialize_compressed(data)
            .map_err(|e| PyValueError::new_err(format!("invalid G1 encoding: {e}")))?;
        if ser(&a, G1_LEN) != data {
            return Err(PyValueError::new_err("non-canonical G1 encoding"));
        }
        Ok(G1 { p: a.into_group() })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new_bound(py, &ser(&self.p.into_affine(), G1_LEN))
    }

    fn __bytes__<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        self.to_bytes(py)
    }

    fn is_identity(&self) -> bool {
        self.p.is_zero()
    }

    fn inverse(&self) -> Self {
        G1 { p: -self.p }
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<G1> = other
            .downcast::<G1>()
            .map_err(|_| PyTypeError::new_err("G1 can only be multiplied by G1"))?
            .borrow();
        Ok(G1 { p: self.p + o.p })
    }

    fn __truediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<G1> = other
            .downcast::<G1>()
            .map_err(|_| PyTypeError::new_err("G1 can only be divided by G1"))?
            .borrow();
        Ok(G1 { p: self.p - o.p })
    }

    fn __pow__(&self, k: BigInt, _modulo: Option<&Bound<'_, PyAny>>) -> Self {
        G1 { p: self.p * to_fr(&k) }
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.downcast::<G1>() {
            Ok(o) => self.p == o.borrow().p,
            Err(_) => false,
        }
    }

    fn __hash__(&self) -> isize {
        hash_bytes(&ser(&self.p.into_affine(), G1_LEN))
    }

    fn __repr__(&self) -> String {
        let b = ser(&self.p.into_affine(), G1_LEN);
        format!("G1({}..)", hex(&b[..8]))
    }
}

#[pymethods]
impl G2 {
    #[staticmethod]
    fn generator() -> Self {
        G2 { p: G2Projective::generator() }
    }

    #[staticmethod]
    fn identity() -> Self {
        G2 { p: G2Projective::zero() }
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        if data.len() != G2_LEN {
            return Err(PyValueError::new_err("G2 encoding must be 96 bytes"));
        }
        let a = G2Affine::deserialize_compressed(data)
            .map_err(|e| PyValueError::new_err(format!("invalid G2 encoding: {e}")))?;
        if ser(&a, G2_LEN) != data {
            return Err(PyValueError::new_err("non-canonical G2 encoding"));
        }
        Ok(G2 { p: a.into_group() })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new_bound(py, &ser(&self.p.into_affine(), G2_LEN))
    }

    fn __bytes__<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        self.to_bytes(py)
    }

    fn is_identity(&self) -> bool {
        self.p.is_zero()
    }

    fn inverse(&self) -> Self {
        G2 { p: -self.p }
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<G2> = other
            .downcast::<G2>()
            .map_err(|_| PyTypeError::new_err("G2 can only be multiplied by G2"))?
            .borrow();
        Ok(G2 { p: self.p + o.p })
    }

    fn __truediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<G2> = other
            .downcast::<G2>()
            .map_err(|_| PyTypeError::new_err("G2 can only be divided by G2"))?
            .borrow();
        Ok(G2 { p: self.p - o.p })
    }

    fn __pow__(&self, k: BigInt, _modulo: Option<&Bound<'_, PyAny>>) -> Self {
        G2 { p: self.p * to_fr(&k) }
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.downcast::<G2>() {
            Ok(o) => self.p == o.borrow().p,
            Err(_) => false,
        }
    }

    fn __hash__(&self) -> isize {
        hash_bytes(&ser(&self.p.into_affine(), G2_LEN))
    }

    fn __repr__(&self) -> String {
        let b = ser(&self.p.into_affine(), G2_LEN);
        format!("G2({}..)", hex(&b[..8]))
    }
}

#[pymethods]
impl GT {
    #[staticmethod]
    fn identity() -> Self {
        GT { v: Fq12::one() }
    }

    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        if data.len() != GT_LEN {
            return Err(PyValueError::new_err("GT encoding must be 576 bytes"));
        }
        let v = Fq12::deserialize_compressed(data)
            .map_err(|e| PyValueError::new_err(format!("invalid GT encoding: {e}")))?;
        if ser(&v, GT_LEN) != data {
            return Err(PyValueError::new_err("non-canonical GT encoding"));
        }
        if v.is_zero() || !v.pow(Fr::MODULUS).is_one() {
            return Err(PyValueError::new_err("GT element outside the order-r subgroup"));
        }
        Ok(GT { v })
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new_bound(py, &ser(&self.v, GT_LEN))
    }

    fn __bytes__<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        self.to_bytes(py)
    }

    fn is_identity(&self) -> bool {
        self.v.is_one()
    }

    fn inverse(&self) -> Self {
        // unitary elements: inverse is the p^6 conjugate
        let mut v = self.v;
        v.cyclotomic_inverse_in_place();
        GT { v }
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<GT> = other
            .downcast::<GT>()
            .map_err(|_| PyTypeError::new_err("GT can only be multiplied by GT"))?
            .borrow();
        Ok(GT { v: self.v * o.v })
    }

    fn __truediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o: PyRef<GT> = other
            .downcast::<GT>()
            .map_err(|_| PyTypeError::new_err("GT can only be divided by GT"))?
            .borrow();
        let mut inv = o.v;
        inv.cyclotomic_inverse_in_place();
        Ok(GT { v: self.v * inv })
    }

    fn __pow__(&self, k: BigInt, _modulo: Option<&Bound<'_, PyAny>>) -> Self {
        let e = PairingOutput::<Bls12_381>(self.v) * to_fr(&k);
        GT { v: e.0 }
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        match other.downcast::<GT>() {
            Ok(o) => self.v == o.borrow().v,
            Err(_) => false,
        }
    }

    fn __hash__(&self) -> isize {
        hash_bytes(&ser(&self.v, GT_LEN))
    }

    fn __repr__(&self) -> String {
        let b = ser(&self.v, GT_LEN);
        format!("GT({}..)", hex(&b[..8]))
    }
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// Reduced optimal-ate pairing e(p, q).
#[pyfunction]
fn pairing(p: PyRef<G1>, q: PyRef<G2>) -> GT {
    GT { v: Bls12_381::pairing(p.p, q.p).0 }
}

/// Product of pairings, sharing one final exponentiation.
#[pyfunction]
fn multi_pairing(ps: Vec<PyRef<G1>>, qs: Vec<PyRef<G2>>) -> PyResult<GT> {
    if ps.len() != qs.len() {
        return Err(PyValueError::new_err("multi_pairing needs equal-length inputs"));
    }
    let a: Vec<G1Affine> = G1Projective::normalize_batch(&ps.iter().map(|x| x.p).collect::<Vec<_>>());
    let b: Vec<G2Affine> = G2Projective::normalize_batch(&qs.iter().map(|x| x.p).collect::<Vec<_>>());
    Ok(GT { v: Bls12_381::multi_pairing(a, b).0 })
}

#[pyfunction]
fn msm_g1(points: Vec<PyRef<G1>>, scalars: Vec<BigInt>) -> PyResult<G1> {
    if points.len() != scalars.len() {
        return Err(PyValueError::new_err("msm needs equal-length inputs"));
    }
    let bases = G1Projective::normalize_batch(&points.iter().map(|x| x.p).collect::<Vec<_>>());
    let ks: Vec<Fr> = scalars.iter().map(to_fr).collect();
    Ok(G1 { p: G1Projective::msm(&bases, &ks).expect("lengths checked") })
}

#[pyfunction]
fn msm_g2(points: Vec<PyRef<G2>>, scalars: Vec<BigInt>) -> PyResult<G2> {
    if points.len() != scalars.len() {
        return Err(PyValueError::new_err("msm needs equal-length inputs"));
    }
    let bases = G2Projective::normalize_batch(&points.iter().map(|x| x.p).collect::<Vec<_>>());
    let ks: Vec<Fr> = scalars.iter().map(to_fr).collect();
    Ok(G2 { p: G2Projective::msm(&bases, &ks).expect("lengths checked") })
}

#[pyfunction]
fn multi_exp_gt(elems: Vec<PyRef<GT>>, scalars: Vec<BigInt>) -> PyResult<GT> {
    if elems.len() != scalars.len() {
        return Err(PyValueError::new_err("multi_exp_gt needs equal-length inputs"));
    }
    let mut acc = PairingOutput::<Bls12_381>(Fq12::one());
    for (e, k) in elems.iter().zip(scalars.iter()) {
        acc += PairingOutput::<Bls12_381>(e.v) * to_fr(k);
    }
    Ok(GT { v: acc.0 })
}

/// RFC 9380 BLS12381G1_XMD:SHA-256_SSWU_RO_ with caller-chosen DST.
#[pyfunction]
fn hash_to_g1(dst: &[u8], msg: &[u8]) -> PyResult<G1> {
    if dst.is_empty() {
        return Err(PyValueError::new_err("domain tag must be non-empty"));
    }
    let hasher = MapToCurveBasedHasher::<
        G1Projective,
        DefaultFieldHasher<Sha256, 128>,
        WBMap<g1::Config>,
    >::new(dst)
    .map_err(|e| PyValueError::new_err(format!("{e:?}")))?;
    let a = hasher.hash(msg).map_err(|e| PyValueError::new_err(format!("{e:?}")))?;
    Ok(G1 { p: a.into_group() })
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<G1>()?;
    m.add_class::<G2>()?;
    m.add_class::<GT>()?;
    m.add_function(wrap_pyfunction!(pairing, m)?)?;
    m.add_function(wrap_pyfunction!(multi_pairing, m)?)?;
    m.add_function(wrap_pyfunction!(msm_g1, m)?)?;
    m.add_function(wrap_pyfunction!(msm_g2, m)?)?;
    m.add_function(wrap_pyfunction!(multi_exp_gt, m)?)?;
    m.add_function(wrap_pyfunction!(hash_to_g1, m)?)?;
    m.add("ORDER", order())?;
    m.add("BACKEND", "native")?;
    Ok(())
}
