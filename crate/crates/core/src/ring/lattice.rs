//! Unimodular basis changes of the exponent lattice.

use num_integer::Integer;

/// Integer matrix stored row-major.
pub type IntMatrix = Vec<Vec<i64>>;

/// Returns `(g, x, y)` with `x*a + y*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Column-Hermite reduction of a single vector: a unimodular `U` with
/// `U v = g e_1`, where `g = gcd(v) >= 0`.
pub fn unimodular_completion(v: &[i64]) -> (IntMatrix, i64) {
    let m = v.len();
    let mut u: IntMatrix = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut w = v.to_vec();
    for i in (1..m).rev() {
        let (a, b) = (w[i - 1], w[i]);
        if b == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(a, b);
        let (p, q) = (-b / g, a / g);
        let (r0, r1) = (u[i - 1].clone(), u[i].clone());
        for j in 0..m {
            u[i - 1][j] = x * r0[j] + y * r1[j];
            u[i][j] = p * r0[j] + q * r1[j];
        }
        w[i - 1] = g;
        w[i] = 0;
    }
    if m > 0 && w[0] < 0 {
        for x in u[0].iter_mut() {
            *x = -*x;
        }
        w[0] = -w[0];
    }
    (u, if m > 0 { w[0] } else { 0 })
}

/// Determinant by fraction-free Bareiss elimination.
pub fn determinant(a: &IntMatrix) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(u: &IntMatrix, v: &[i64]) -> Vec<i64> {
        u.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn completion_sends_vector_to_axis() {
        for v in [vec![3, -5, 7], vec![0, 4, 6], vec![2], vec![-6, 0, 0, 9], vec![1, 1, 1, 1]] {
            let (u, g) = unimodular_completion(&v);
            let img = apply(&u, &v);
            assert_eq!(img[0], g);
            assert!(img[1..].iter().all(|&x| x == 0));
            assert_eq!(determinant(&u).abs(), 1);
        }
    }
}
