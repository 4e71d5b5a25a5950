//! Disjoint sets where every root is the least index of its set.

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        assert!(len <= u32::MAX as usize);
        UnionFind { parent: (0..len as u32).collect() }
    }

    pub fn from_parents(parent: Vec<u32>) -> Self {
        UnionFind { parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Links the larger root under the smaller one.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo as u32;
        true
    }

    /// Points every entry straight at its root.
    pub fn flatten(&mut self) {
        for i in 0..self.parent.len() {
            let r = self.find(i);
            self.parent[i] = r as u32;
        }
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }
}
