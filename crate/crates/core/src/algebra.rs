//! Group arithmetic directly on portraits.
//!
//! Portraits are interned: each distinct portrait gets a dense [`ElementId`], and since
//! portraits are canonical, ids identify group elements. Products follow the wreath
//! recursion `(alpha, g_u)(beta, h_u) = (alpha beta, g_u h_{alpha(u)})`; the only
//! words ever evaluated are products and inverses of two nucleus elements, once, at
//! construction. A node whose children are all leaves collapses back to a leaf when it
//! matches a nucleus element, which keeps every result minimal.

use rustc_hash::FxHashMap as HashMap;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::perm::Permutation;
use crate::portrait::{build_portrait, canonical_key, Portrait, DEFAULT_MAX_DEPTH};
use crate::word::inverse_word;

pub type ElementId = u32;

#[derive(Clone, Debug)]
struct Entry {
    perm: u32,
    // offset into `children`; unused for leaves
    start: u32,
    depth: u16,
    leaf: bool,
}

pub struct PortraitStore {
    degree: usize,
    nucleus_len: usize,
    perms: Vec<Permutation>,
    perm_ids: HashMap<Permutation, u32>,
    compose: HashMap<(u32, u32), u32>,
    perm_inverse: HashMap<u32, u32>,
    entries: Vec<Entry>,
    children: Vec<ElementId>,
    interned: HashMap<Box<[u32]>, ElementId>,
    // leaf index by (perm, leaf children)
    nuclear: HashMap<Box<[u32]>, ElementId>,
    leaf_sections: Vec<Vec<ElementId>>,
    leaf_products: Vec<Vec<ElementId>>,
    leaf_inverses: Vec<ElementId>,
    mul_memo: HashMap<(ElementId, ElementId), ElementId>,
    inv_memo: HashMap<ElementId, ElementId>,
}

impl PortraitStore {
    /// Prepares the arithmetic. Fails if the nucleus is not closed under sections or a
    /// product of two nucleus elements has no portrait within the default depth budget.
    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let d = spec.degree();
        let n = spec.nucleus().len();
        let mut store = PortraitStore {
            degree: d,
            nucleus_len: n,
            perms: Vec::new(),
            perm_ids: HashMap::default(),
            compose: HashMap::default(),
            perm_inverse: HashMap::default(),
            entries: Vec::new(),
            children: Vec::new(),
            interned: HashMap::default(),
            nuclear: HashMap::default(),
            leaf_sections: Vec::new(),
            leaf_products: Vec::new(),
            leaf_inverses: Vec::new(),
            mul_memo: HashMap::default(),
            inv_memo: HashMap::default(),
        };
        for nu in spec.nucleus() {
            let (perm, secs) = spec.decompose(nu)?;
            let pid = store.perm_id(&perm);
            store.entries.push(Entry { perm: pid, start: 0, depth: 0, leaf: true });
            let mut leaf_secs = Vec::with_capacity(d);
            for s in &secs {
                match spec.nucleus_index(s)? {
                    Some(j) => leaf_secs.push(j as ElementId),
                    None => {
                        return Err(Error::InvalidSpec(format!(
                            "nucleus is not closed under sections: `{}` has section `{}`",
                            spec.format_word(nu),
                            spec.format_word(s)
                        )))
                    }
                }
            }
            store.leaf_sections.push(leaf_secs);
        }
        for i in 0..n {
            let mut key = vec![store.entries[i].perm];
            key.extend(&store.leaf_sections[i]);
            store.nuclear.insert(key.into_boxed_slice(), i as ElementId);
        }
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let w = spec.nucleus()[i].concat(&spec.nucleus()[j]);
                let p = build_portrait(spec, &w, DEFAULT_MAX_DEPTH)?;
                row.push(store.intern(&p));
            }
            store.leaf_products.push(row);
        }
        for i in 0..n {
            let p = build_portrait(spec, &inverse_word(&spec.nucleus()[i]), DEFAULT_MAX_DEPTH)?;
            let id = store.intern(&p);
            store.leaf_inverses.push(id);
        }
        Ok(store)
    }

    fn perm_id(&mut self, p: &Permutation) -> u32 {
        if let Some(&id) = self.perm_ids.get(p) {
            return id;
        }
        let id = self.perms.len() as u32;
        self.perms.push(p.clone());
        self.perm_ids.insert(p.clone(), id);
        id
    }

    fn compose_ids(&mut self, a: u32, b: u32) -> u32 {
        if let Some(&c) = self.compose.get(&(a, b)) {
            return c;
        }
        let p = self.perms[a as usize].then(&self.perms[b as usize]);
        let c = self.perm_id(&p);
        self.compose.insert((a, b), c);
        c
    }

    fn invert_perm(&mut self, a: u32) -> u32 {
        if let Some(&c) = self.perm_inverse.get(&a) {
            return c;
        }
        let p = self.perms[a as usize].inverse();
        let c = self.perm_id(&p);
        self.perm_inverse.insert(a, c);
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of distinct elements interned so far.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Id of nucleus element `i`.
    pub fn leaf(&self, i: usize) -> ElementId {
        assert!(i < self.nucleus_len);
        i as ElementId
    }

    pub fn depth(&self, g: ElementId) -> usize {
        self.entries[g as usize].depth as usize
    }

    pub fn is_leaf(&self, g: ElementId) -> bool {
        self.entries[g as usize].leaf
    }

    pub fn root_permutation(&self, g: ElementId) -> &Permutation {
        &self.perms[self.entries[g as usize].perm as usize]
    }

    fn kids(&self, g: ElementId) -> &[ElementId] {
        let e = &self.entries[g as usize];
        &self.children[e.start as usize..e.start as usize + self.degree]
    }

    /// First-level sections of `g`.
    pub fn sections(&self, g: ElementId) -> Vec<ElementId> {
        (0..self.degree).map(|u| self.section(g, u)).collect()
    }

    #[inline]
    pub fn section(&self, g: ElementId, u: usize) -> ElementId {
        let e = &self.entries[g as usize];
        if e.leaf {
            self.leaf_sections[g as usize][u]
        } else {
            self.children[e.start as usize + u]
        }
    }

    fn make(&mut self, perm: u32, kids: &[ElementId]) -> ElementId {
        let mut key = Vec::with_capacity(kids.len() + 1);
        key.push(perm);
        key.extend_from_slice(kids);
        if kids.iter().all(|&k| self.is_leaf(k)) {
            if let Some(&leaf) = self.nuclear.get(key.as_slice()) {
                return leaf;
            }
        }
        if let Some(&id) = self.interned.get(key.as_slice()) {
            return id;
        }
        let depth = 1 + kids.iter().map(|&k| self.entries[k as usize].depth).max().unwrap_or(0);
        let id = self.entries.len() as ElementId;
        let start = self.children.len() as u32;
        self.children.extend_from_slice(kids);
        self.entries.push(Entry { perm, start, depth, leaf: false });
        self.interned.insert(key.into_boxed_slice(), id);
        id
    }

    /// Interns a portrait tree (normalising non-minimal nodes).
    pub fn intern(&mut self, p: &Portrait) -> ElementId {
        match p {
            Portrait::Leaf(i) => *i as ElementId,
            Portrait::Node(perm, kids) => {
                let ids: Vec<ElementId> = kids.iter().map(|k| self.intern(k)).collect();
                let pid = self.perm_id(perm);
                self.make(pid, &ids)
            }
        }
    }

    pub fn portrait(&self, g: ElementId) -> Portrait {
        if self.is_leaf(g) {
            Portrait::Leaf(g as usize)
        } else {
            Portrait::Node(self.root_permutation(g).clone(), self.kids(g).iter().map(|&k| self.portrait(k)).collect())
        }
    }

    pub fn canonical_key(&self, g: ElementId) -> Vec<u8> {
        canonical_key(&self.portrait(g))
    }

    pub fn mul(&mut self, g: ElementId, h: ElementId) -> ElementId {
        if let Some(&r) = self.mul_memo.get(&(g, h)) {
            return r;
        }
        let r = self.mul_uncached(g, h);
        self.mul_memo.insert((g, h), r);
        r
    }

    /// Product without recording the top-level result in the memo table; the
    /// recursive products of sections are still memoised.
    pub fn mul_uncached(&mut self, g: ElementId, h: ElementId) -> ElementId {
        self.mul_bounded(g, h, usize::MAX).expect("unbounded product")
    }

    /// Product `gh` if its depth is at most `limit`, else `None`. Gives up as soon as a
    /// section is known to be too deep.
    pub fn mul_bounded(&mut self, g: ElementId, h: ElementId, limit: usize) -> Option<ElementId> {
        if let Some(&r) = self.mul_memo.get(&(g, h)) {
            return (self.depth(r) <= limit).then_some(r);
        }
        if self.is_leaf(g) && self.is_leaf(h) {
            let r = self.leaf_products[g as usize][h as usize];
            return (self.depth(r) <= limit).then_some(r);
        }
        let gp = self.entries[g as usize].perm;
        let hp = self.entries[h as usize].perm;
        let child_limit = limit.saturating_sub(1);
        let mut kids = [0 as ElementId; 16];
        let mut heap = Vec::new();
        let kids: &mut [ElementId] = if self.degree <= 16 {
            &mut kids[..self.degree]
        } else {
            heap.resize(self.degree, 0);
            &mut heap
        };
        for (u, slot) in kids.iter_mut().enumerate() {
            let v = self.perms[gp as usize].apply(u);
            let (a, b) = (self.section(g, u), self.section(h, v));
            let r = self.mul_bounded(a, b, child_limit)?;
            self.mul_memo.insert((a, b), r);
            *slot = r;
        }
        let perm = self.compose_ids(gp, hp);
        let r = self.make(perm, kids);
        (self.depth(r) <= limit).then_some(r)
    }

    pub fn inverse(&mut self, g: ElementId) -> ElementId {
        if self.is_leaf(g) {
            return self.leaf_inverses[g as usize];
        }
        if let Some(&r) = self.inv_memo.get(&g) {
            return r;
        }
        let gp = self.entries[g as usize].perm;
        let inv_p = self.invert_perm(gp);
        let inv_perm = self.perms[inv_p as usize].clone();
        let g_kids = self.kids(g).to_vec();
        let kids: Vec<ElementId> = (0..self.degree).map(|u| self.inverse(g_kids[inv_perm.apply(u)])).collect();
        let r = self.make(inv_p, &kids);
        self.inv_memo.insert(g, r);
        r
    }

    /// Drops memoised products, keeping interned elements.
    pub fn clear_memo(&mut self) {
        self.mul_memo.clear();
        self.inv_memo.clear();
    }
}
