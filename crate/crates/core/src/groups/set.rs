use crate::error::{Error, Result};
use crate::field::FieldCtx;

/// Common interface of SL2 and H1 elements.
pub trait GroupElem: Copy + Eq + std::fmt::Debug + Send + Sync {
    /// Injective packing of the entries into one integer for a fixed `p`.
    fn key(&self, p: u64) -> u64;
    fn compose(&self, ctx: &FieldCtx, rhs: &Self) -> Result<Self>;
    fn inverse(&self, ctx: &FieldCtx) -> Self;
}

/// A duplicate-free set of group elements ordered by canonical key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSet<E> {
    p: u64,
    elems: Vec<E>,
    keys: Vec<u64>,
    symmetric: bool,
}

impl<E: GroupElem> MatrixSet<E> {
    pub fn new(ctx: &FieldCtx, elems: impl IntoIterator<Item = E>) -> Self {
        let p = ctx.p();
        let mut pairs: Vec<(u64, E)> = elems.into_iter().map(|e| (e.key(p), e)).collect();
        pairs.sort_unstable_by_key(|&(k, _)| k);
        pairs.dedup_by_key(|&mut (k, _)| k);
        let (keys, elems): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mut set = MatrixSet {
            p,
            elems,
            keys,
            symmetric: false,
        };
        set.symmetric = set
            .elems
            .iter()
            .all(|g| set.contains_key(g.inverse(ctx).key(p)));
        set
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[E] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = &E> {
        self.elems.iter()
    }

    /// Closed under inversion (checked at construction).
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn contains_key(&self, k: u64) -> bool {
        self.keys.binary_search(&k).is_ok()
    }

    pub fn contains(&self, g: &E) -> bool {
        self.contains_key(g.key(self.p))
    }

    /// The set together with all inverses.
    pub fn symmetrized(&self, ctx: &FieldCtx) -> Self {
        let inverses: Vec<E> = self.elems.iter().map(|g| g.inverse(ctx)).collect();
        MatrixSet::new(ctx, self.elems.iter().copied().chain(inverses))
    }

    pub fn union(&self, ctx: &FieldCtx, other: &Self) -> Result<Self> {
        self.check_modulus(other.p)?;
        Ok(MatrixSet::new(
            ctx,
            self.elems.iter().chain(other.elems.iter()).copied(),
        ))
    }

    /// `{g·s : s ∈ self}`.
    pub fn left_translate(&self, ctx: &FieldCtx, g: &E) -> Result<Self> {
        let elems = self
            .elems
            .iter()
            .map(|s| g.compose(ctx, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixSet::new(ctx, elems))
    }

    pub(crate) fn check_modulus(&self, p: u64) -> Result<()> {
        if self.p != p {
            return Err(Error::MixedModulus(self.p, p));
        }
        Ok(())
    }
}
