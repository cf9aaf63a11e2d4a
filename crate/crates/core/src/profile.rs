//! Per-node value vectors (offer profiles, splits) and the solver's output type.

use std::ops::{Index, IndexMut};

use crate::instance::{Instance, NodeId, NodeSet, Side};
use crate::matching::Matching;
use crate::scalar::Scalar;

/// Dense per-node values, indexed by [`NodeId`].
///
/// Profiles computed on a subinstance hold NaN for nodes outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMap<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Offer vector `O`: one payoff offer per node.
pub type OfferProfile<T> = NodeMap<T>;

impl<T: Scalar> NodeMap<T> {
    pub fn filled(a_count: usize, b_count: usize, value: T) -> Self {
        NodeMap {
            a: vec![value; a_count],
            b: vec![value; b_count],
        }
    }

    pub fn zeros(a_count: usize, b_count: usize) -> Self {
        Self::filled(a_count, b_count, T::zero())
    }

    /// All entries NaN; used as the starting point for subinstance profiles.
    pub fn undefined(a_count: usize, b_count: usize) -> Self {
        Self::filled(a_count, b_count, T::nan())
    }

    pub fn for_instance(inst: &Instance<T>) -> Self {
        Self::zeros(inst.a_count(), inst.b_count())
    }

    pub fn get(&self, node: NodeId) -> T {
        self[node]
    }

    pub fn set(&mut self, node: NodeId, value: T) {
        self[node] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, T)> + '_ {
        self.a
            .iter()
            .enumerate()
            .map(|(i, &v)| (NodeId::a(i), v))
            .chain(self.b.iter().enumerate().map(|(j, &v)| (NodeId::b(j), v)))
    }

    /// Copies the entries of `nodes` from `other`.
    pub fn overwrite_from(&mut self, other: &NodeMap<T>, nodes: &NodeSet) {
        for node in nodes.iter() {
            self[node] = other[node];
        }
    }

    /// Finite on every node of `nodes`.
    pub fn is_defined_on(&self, nodes: &NodeSet) -> bool {
        nodes.iter().all(|n| self[n].is_finite())
    }

    /// Largest absolute difference over `nodes`.
    pub fn max_abs_diff(&self, other: &NodeMap<T>, nodes: &NodeSet) -> T {
        nodes
            .iter()
            .map(|n| (self[n] - other[n]).abs())
            .fold(T::zero(), |m, d| if d > m || d.is_nan() { d } else { m })
    }

    pub fn cast<U: Scalar>(&self) -> NodeMap<U> {
        NodeMap {
            a: self.a.iter().map(|&x| U::lit(x.as_f64())).collect(),
            b: self.b.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T> Index<NodeId> for NodeMap<T> {
    type Output = T;

    fn index(&self, node: NodeId) -> &T {
        match node.side {
            Side::A => &self.a[node.index],
            Side::B => &self.b[node.index],
        }
    }
}

impl<T> IndexMut<NodeId> for NodeMap<T> {
    fn index_mut(&mut self, node: NodeId) -> &mut T {
        match node.side {
            Side::A => &mut self.a[node.index],
            Side::B => &mut self.b[node.index],
        }
    }
}

/// A matching together with splits on its edges and the resulting payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct StableWeightedMatching<T> {
    pub matching: Matching,
    pub splits: NodeMap<T>,
    pub profile: OfferProfile<T>,
    pub iterations: usize,
}

impl<T: Scalar> StableWeightedMatching<T> {
    /// Sum of edge weights over the matching, accumulated in ascending A order.
    pub fn total_weight(&self, inst: &Instance<T>) -> T {
        matching_weight(inst, &self.matching)
    }
}

pub fn matching_weight<T: Scalar>(inst: &Instance<T>, matching: &Matching) -> T {
    matching
        .pairs()
        .map(|(a, b)| {
            let k = inst.edge_index(a, b).expect("matching edge exists in instance");
            inst.edge(k).weight
        })
        .fold(T::zero(), |s, w| s + w)
}
