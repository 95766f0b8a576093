//! Enumeration and indexing of monomials of a fixed degree.

use std::collections::HashMap;

/// All exponent vectors of length `n` and total degree `d`, in descending lexicographic
/// order (`x_1^d` first).
#[derive(Clone, Debug)]
pub struct Monomials {
    n: usize,
    degree: usize,
    list: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl Monomials {
    pub fn new(n: usize, degree: usize) -> Self {
        let mut list = Vec::new();
        let mut cur = vec![0u8; n];
        fill(&mut list, &mut cur, 0, degree);
        let index = list.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Monomials { n, degree, list, index }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.list.iter().map(Vec::as_slice)
    }

    pub fn index_of(&self, m: &[u8]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of the product of two monomials, looked up in `self`.
    pub fn product_index(&self, a: &[u8], b: &[u8]) -> usize {
        let p: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.index[&p]
    }

    /// `table[k][g]` = index in `self` of `x_k * lower[g]`.
    pub fn times_variable_table(&self, lower: &Monomials) -> Vec<Vec<usize>> {
        assert_eq!(lower.degree + 1, self.degree);
        (0..self.n)
            .map(|k| {
                lower
                    .iter()
                    .map(|g| {
                        let mut m = g.to_vec();
                        m[k] += 1;
                        self.index[&m]
                    })
                    .collect()
            })
            .collect()
    }
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut [u8], pos: usize, left: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u8;
        out.push(cur.to_vec());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e as u8;
        fill(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

/// `C(n + k - 1, k)`, the number of monomials of degree `k` in `n` variables.
pub fn count(n: usize, k: usize) -> usize {
    if n == 0 {
        return usize::from(k == 0);
    }
    binomial(n + k - 1, k)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let m = Monomials::new(3, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m.get(0), &[2, 0, 0]);
        assert_eq!(m.get(5), &[0, 0, 2]);
        assert_eq!(count(10, 5), 2002);
        assert_eq!(Monomials::new(4, 3).len(), count(4, 3));
        assert_eq!(Monomials::new(2, 0).len(), 1);
        let lower = Monomials::new(3, 1);
        let t = m.times_variable_table(&lower);
        assert_eq!(m.get(t[1][0]), &[1, 1, 0]);
    }
}
