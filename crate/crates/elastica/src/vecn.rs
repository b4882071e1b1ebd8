//! Small helpers for length-n vectors stored as slices.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// a += s * b
#[inline]
pub fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

/// Component of `a` orthogonal to the unit vector `u`.
#[inline]
pub fn reject_unit(a: &[f64], u: &[f64]) -> Vec<f64> {
    let p = dot(a, u);
    a.iter().zip(u).map(|(x, y)| x - p * y).collect()
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

/// 2D cross product (z-component of the 3D cross).
#[inline]
pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// 3D cross product.
#[inline]
pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `u`,
/// built by Gram-Schmidt over the coordinate directions (most transverse
/// axis first so the basis is well conditioned).
pub fn orthonormal_complement(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&i, &j| u[i].abs().partial_cmp(&u[j].abs()).unwrap());
    for &ax in &axes {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[ax] = 1.0;
        let p = dot(&v, u);
        axpy(&mut v, -p, u);
        for b in &basis {
            let p = dot(&v, b);
            axpy(&mut v, -p, b);
        }
        let len = norm(&v);
        if len > 1e-8 {
            basis.push(scale(&v, 1.0 / len));
        }
    }
    debug_assert_eq!(basis.len(), n - 1);
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let u = normalized(&[0.3, -0.4, 0.8660254037844386]).unwrap();
        let basis = orthonormal_complement(&u);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(dot(b, &u).abs() < 1e-12);
            assert!((norm(b) - 1.0).abs() < 1e-12);
        }
        assert!(dot(&basis[0], &basis[1]).abs() < 1e-12);
    }
}
