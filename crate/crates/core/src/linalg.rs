//! Dense symmetric eigensolver: Householder tridiagonalization followed by the
//! implicit QL iteration, plus a Lanczos driver for the extreme eigenvalues of large
//! sparse operators.

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix { n, a: vec![0.0; n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        self.a[i * self.n + j] += x;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.a[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Eigenvalues in ascending order and, if requested, the matching orthonormal
/// eigenvectors as columns of a row-major matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

impl Eigen {
    /// Component `i` of eigenvector `j`.
    pub fn vector_entry(&self, i: usize, j: usize) -> f64 {
        let n = self.values.len();
        self.vectors.as_ref().expect("eigenvectors were not requested")[i * n + j]
    }
}

pub fn symmetric_eigen(m: &SymMatrix, vectors: bool) -> Eigen {
    let n = m.n;
    if n == 0 {
        return Eigen { values: Vec::new(), vectors: vectors.then(Vec::new) };
    }
    let mut v = m.a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e, vectors);
    tql2(n, &mut v, &mut d, &mut e, vectors);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = vectors.then(|| {
        let mut out = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                out[r * n + new] = v[r * n + old];
            }
        }
        out
    });
    Eigen { values, vectors }
}

fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in e.iter_mut().take(i) {
                *x = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    if !vectors {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64], vectors: bool) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d.iter_mut().take(n).skip(l + 2) {
                    *x -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let hk = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * hk;
                            v[k * n + i] = c * v[k * n + i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Ritz values of a symmetric operator restricted to the orthogonal complement of
/// `deflate` (orthonormal vectors), with their residual bounds.
#[derive(Clone, Debug)]
pub struct Lanczos {
    pub ritz: Vec<f64>,
    pub residuals: Vec<f64>,
    pub steps: usize,
}

/// Lanczos with full reorthogonalization, starting from `start`.
pub fn lanczos<F: Fn(&[f64]) -> Vec<f64>>(apply: F, start: Vec<f64>, deflate: &[Vec<f64>], max_steps: usize) -> Lanczos {
    let n = start.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let project = |w: &mut Vec<f64>, basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for b in basis {
                let c = dot(w, b);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
    };
    let mut q = start;
    project(&mut q, deflate);
    let norm = dot(&q, &q).sqrt();
    if norm == 0.0 {
        return Lanczos { ritz: Vec::new(), residuals: Vec::new(), steps: 0 };
    }
    q.iter_mut().for_each(|x| *x /= norm);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last_beta = 0.0;
    for j in 0..max_steps.min(n) {
        let mut w = apply(&basis[j]);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        project(&mut w, deflate);
        project(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        last_beta = b;
        if b < 1e-12 || j + 1 == max_steps.min(n) {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    let m = alpha.len();
    let mut t = SymMatrix::zeros(m);
    for i in 0..m {
        t.add(i, i, alpha[i]);
        if i + 1 < m {
            t.add(i, i + 1, beta[i]);
            t.add(i + 1, i, beta[i]);
        }
    }
    let eig = symmetric_eigen(&t, true);
    let residuals = (0..m).map(|i| last_beta * eig.vector_entry(m - 1, i).abs()).collect();
    Lanczos { ritz: eig.values, residuals, steps: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m.add(i, j, x);
                if i != j {
                    m.add(j, i, x);
                }
            }
        }
        m
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let mut m = SymMatrix::zeros(2);
        m.add(0, 1, 1.0);
        m.add(1, 0, 1.0);
        let e = symmetric_eigen(&m, false);
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let one = SymMatrix { n: 1, a: vec![3.5] };
        assert_eq!(symmetric_eigen(&one, true).values, vec![3.5]);
    }

    #[test]
    fn matches_nalgebra() {
        for (n, seed) in [(5, 1), (17, 2), (40, 3)] {
            let m = random_sym(n, seed);
            let ours = symmetric_eigen(&m, false).values;
            let na = nalgebra::DMatrix::from_row_slice(n, n, &m.a);
            let mut theirs: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn lanczos_finds_extremes() {
        let m = random_sym(60, 9);
        let full = symmetric_eigen(&m, false).values;
        let l = lanczos(|x| m.mul_vec(x), vec![1.0; 60], &[], 60);
        assert!((l.ritz[0] - full[0]).abs() < 1e-8);
        assert!((l.ritz.last().unwrap() - full.last().unwrap()).abs() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn eigenpairs_have_small_residuals(n in 1usize..25, seed in 0u64..10_000) {
            let m = random_sym(n, seed);
            let e = symmetric_eigen(&m, true);
            for j in 0..n {
                let v: Vec<f64> = (0..n).map(|i| e.vector_entry(i, j)).collect();
                let mv = m.mul_vec(&v);
                let r: f64 = mv.iter().zip(&v).map(|(a, b)| (a - e.values[j] * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(r < 1e-10);
                let norm: f64 = v.iter().map(|x| x * x).sum();
                prop_assert!((norm - 1.0).abs() < 1e-10);
            }
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            prop_assert!((trace - e.values.iter().sum::<f64>()).abs() < 1e-9);
        }
    }
}
