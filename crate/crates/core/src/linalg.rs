//! Hermitian eigensolver and a few small dense routines.

use crate::operator::{Operator, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are the
/// matching eigenvectors. Only the Hermitian part of `m` is used.
pub fn eigh(m: &Operator) -> (Vec<f64>, Operator) {
    let (vals, vecs) = jacobi(m, true);
    (vals, vecs.expect("eigenvectors requested"))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigvalsh(m: &Operator) -> Vec<f64> {
    jacobi(m, false).0
}

fn jacobi(m: &Operator, want_vectors: bool) -> (Vec<f64>, Option<Operator>) {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| Operator::identity(n));

    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = v.map(|v| Operator::from_fn(n, n, |r, c| v[(r, order[c])]));
    (vals, vecs)
}

/// One Jacobi rotation annihilating `a[p][q]`. The update is `a ← J† a J`
/// with `J = Φ R`: `Φ` rotates the phase of `a[p][q]` to real and `R` is the
/// real symmetric Jacobi rotation.
fn rotate(a: &mut Operator, v: Option<&mut Operator>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.rows();
    let e = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let zeta = (aqq - app) / (2.0 * g);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ec = e.conj();

    // columns: a ← a J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ec * s;
        a[(k, q)] = akp * s + akq * ec * c;
    }
    // rows: a ← J† a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * e * s;
        a[(q, k)] = apk * s + aqk * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * g, 0.0);
    a[(q, q)] = C64::new(aqq + t * g, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * ec * s;
            v[(k, q)] = vkp * s + vkq * ec * c;
        }
    }
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(Λ) V†`.
pub fn hermitian_function(m: &Operator, f: impl Fn(f64) -> C64) -> Operator {
    let (vals, vecs) = eigh(m);
    let n = m.rows();
    Operator::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * f(vals[k]) * vecs[(j, k)].conj()).sum())
}

/// `exp(i·h)` for Hermitian `h`.
pub fn exp_i_hermitian(h: &Operator) -> Operator {
    hermitian_function(h, |x| C64::from_polar(1.0, x))
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det(m: &Operator) -> C64 {
    assert!(m.is_square(), "determinant needs a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        if a[(pivot, col)].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let d = a[(col, col)];
        det *= d;
        for r in (col + 1)..n {
            let f = a[(r, col)] / d;
            for k in col..n {
                let v = a[(col, k)];
                a[(r, k)] -= f * v;
            }
        }
    }
    det
}
