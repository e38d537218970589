//! Engine values checked against independent computations written here.

use qva_core::ding_iohara::{component_table, verma_sweep, AAlphaModule};
use qva_core::fock::{self, apply_bar_mode, FockMonomial, FockVector, Statistics};
use qva_core::ratfunc::{canonicalize, compute_h, RationalFn};
use qva_core::scalar::{frac, int, Scalar};
use qva_core::series::iota_z0;
use qva_core::vacuum::{self, required_trunc, AhContext};
use qva_core::Gen;
use rug::Integer;

fn rf(n: &[i64], d: &[i64]) -> RationalFn {
    RationalFn::from_ints(n, d).unwrap()
}

/// Power series division by the schoolbook recurrence.
fn divide(num: &[Scalar], den: &[Scalar], n: usize) -> Vec<Scalar> {
    let mut out: Vec<Scalar> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = num.get(k).cloned().unwrap_or_default();
        for j in 1..=k {
            if let Some(d) = den.get(j) {
                acc -= Scalar::from(d * &out[k - j]);
            }
        }
        out.push(acc / &den[0]);
    }
    out
}

fn exp_coeffs(c: i64, n: usize) -> Vec<Scalar> {
    let mut fact = Integer::from(1);
    let mut pow = Integer::from(1);
    (0..n)
        .map(|k| {
            if k > 0 {
                fact *= k as u32;
                pow *= c;
            }
            Scalar::from((pow.clone(), fact.clone()))
        })
        .collect()
}

#[test]
fn mobius_geometric_expansion() {
    // (z-2) Σ (2z)^k: g_0 = -2 and g_k = -3·2^{k-1}
    let s = iota_z0(&rf(&[-2, 1], &[1, -2]), 12);
    assert_eq!(s.coeff(0), -2);
    for k in 1..12 {
        assert_eq!(s.coeff(k), Scalar::from(-3 * (1i64 << (k - 1))), "k={k}");
    }
}

#[test]
fn h_of_mobius_by_series_division() {
    let n = 14;
    let e = exp_coeffs(1, n);
    let mut num = e.clone();
    num[0] -= 2;
    let den: Vec<Scalar> = e.iter().enumerate().map(|(k, c)| if k == 0 { int(1) - Scalar::from(2 * c) } else { Scalar::from(-2 * c) }).collect();
    let oracle = divide(&num, &den, n);
    let h = compute_h(&canonicalize(&rf(&[-2, 1], &[1, -2])).unwrap(), n as i64);
    for k in 0..n {
        assert_eq!(h.coeff(k as i64), oracle[k], "x^{k}");
    }
}

#[test]
fn h_of_monomials() {
    let hz = compute_h(&canonicalize(&rf(&[0, 1], &[1])).unwrap(), 10);
    let hm = compute_h(&canonicalize(&rf(&[0, 0, -1], &[1])).unwrap(), 10);
    for (k, (a, b)) in exp_coeffs(1, 10).iter().zip(exp_coeffs(2, 10)).enumerate() {
        assert_eq!(&hz.coeff(k as i64), a);
        assert_eq!(hm.coeff(k as i64), -b);
    }
}

#[test]
fn component_table_values() {
    let t = component_table(&canonicalize(&rf(&[-2, 1], &[1, -2])).unwrap(), 8);
    // g(1/z) = -(1/2)(1-2z) Σ (z/2)^k
    assert_eq!(t.gtilde(0), frac(-1, 2));
    for k in 1..8 {
        assert_eq!(t.gtilde(k), Scalar::from((3, 1i64 << (k + 1))), "k={k}");
    }
}

fn count_triples(d: u32, strict_ef: bool) -> usize {
    // explicit multiset enumeration: nonincreasing part lists
    fn lists(n: u32, max: u32, strict: bool, acc: &mut usize) {
        if n == 0 {
            *acc += 1;
            return;
        }
        for k in (1..=max.min(n)).rev() {
            lists(n - k, if strict { k - 1 } else { k }, strict, acc);
        }
    }
    let one = |n: u32, s: bool| {
        let mut c = 0;
        lists(n, n, s, &mut c);
        c
    };
    (0..=d).flat_map(|a| (0..=d - a).map(move |b| (a, b))).map(|(a, b)| one(a, strict_ef) * one(b, strict_ef) * one(d - a - b, false)).sum()
}

#[test]
fn basis_counts_match_enumeration() {
    for d in 0..=6 {
        assert_eq!(fock::enumerate_basis(d, Statistics::Plain).len(), count_triples(d, false), "plain {d}");
        assert_eq!(fock::enumerate_basis(d, Statistics::Super).len(), count_triples(d, true), "super {d}");
    }
}

#[test]
fn loop_bracket_on_vacuum() {
    for s in [Statistics::Plain, Statistics::Super] {
        let one = FockVector::vacuum(s);
        let f = apply_bar_mode(Gen::F, -1, &one);
        assert_eq!(apply_bar_mode(Gen::E, 0, &f), apply_bar_mode(Gen::Psi, -1, &one));
        assert!(apply_bar_mode(Gen::E, 1, &f).is_zero());
    }
}

#[test]
fn dressed_derivation_on_vacuum_generator() {
    // d(e(-1)1) - e(-1) d(1) = e(-2) 1
    let ctx = AhContext::from_g(&rf(&[-2, 1], &[1, -2]), required_trunc(2, -2)).unwrap();
    let one = FockVector::vacuum(ctx.stats());
    let lhs = fock::derivation(&ctx.apply_mode(Gen::E, -1, &one));
    assert_eq!(lhs, ctx.apply_mode(Gen::E, -2, &one));
    // on the vacuum the dressed creation mode is the bare one
    let m = FockMonomial::new(&[1], &[], &[], ctx.stats()).unwrap();
    assert_eq!(ctx.apply_mode(Gen::E, -1, &one), FockVector::monomial(m, ctx.stats()));
}

#[test]
fn pbw_counts_degree_two() {
    let plain = AhContext::from_g(&rf(&[-2, 1], &[1, -2]), 12).unwrap();
    let sup = AhContext::from_g(&rf(&[2, -1], &[1, -2]), 12).unwrap();
    assert_eq!(vacuum::pbw_vectors(&plain, 2).len(), 9);
    assert_eq!(vacuum::pbw_vectors(&sup, 2).len(), 7);
}

#[test]
fn verma_dims_for_minus_one() {
    // induced module of the color loop algebra: twice the super counts
    let t = component_table(&canonicalize(&rf(&[-1], &[1])).unwrap(), 8);
    let m = &verma_sweep(&t, &AAlphaModule::u_lambda(&int(2)), 2, &[3]).unwrap()[0];
    let expect: Vec<usize> = (0..=2).map(|d| 2 * count_triples(d, true)).collect();
    assert_eq!(m.dims, expect);
}
