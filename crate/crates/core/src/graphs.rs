//! Reduction graphs, regular-model data, rooted component trees, the layer
//! computation, and the attainable-AU enumeration.
//!
//! A model records the combinatorics that drive the invariant calculus: the
//! tree/non-tree dichotomy of the reduction graph, and for each irreducible
//! component of the closed fiber, whether it is an unspecified curve, a
//! rational one, or itself described by a nested model one Laurent layer
//! down.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::descriptor::{join, AuSet, BaseClass, FieldDescriptor, InvariantValue, ValidityReport};
use crate::error::Error;

// ---------------------------------------------------------------------------
// Reduction graphs
// ---------------------------------------------------------------------------

/// Role of a vertex in the bipartite reduction graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Component,
    Point,
}

/// The reduction graph of a regular model: connected, with multi-edges
/// allowed (two components meeting at two points is the canonical case).
/// First Betti number |E| - |V| + 1 decides tree-ness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReductionGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub bipartition: Option<Vec<VertexKind>>,
}

impl ReductionGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        ReductionGraph {
            vertex_count,
            edges,
            bipartition: None,
        }
    }

    /// Two components meeting at two points: the 4-edge bipartite cycle.
    pub fn two_components_two_points() -> Self {
        ReductionGraph {
            vertex_count: 4,
            edges: vec![(0, 2), (1, 2), (0, 3), (1, 3)],
            bipartition: Some(vec![
                VertexKind::Component,
                VertexKind::Component,
                VertexKind::Point,
                VertexKind::Point,
            ]),
        }
    }

    /// A path through `s` component vertices alternating with s-1 point
    /// vertices; the trivial one-vertex graph for s = 1. Always a tree.
    pub fn component_path(s: usize) -> Self {
        assert!(s >= 1);
        let mut edges = Vec::new();
        let mut kinds = vec![VertexKind::Component; s];
        for i in 0..s - 1 {
            let point = s + i;
            edges.push((i, point));
            edges.push((i + 1, point));
            kinds.push(VertexKind::Point);
        }
        ReductionGraph {
            vertex_count: 2 * s - 1,
            edges,
            bipartition: Some(kinds),
        }
    }

    /// A cycle through `s` component vertices alternating with s point
    /// vertices; for s = 1, one component meeting one point along two
    /// branches (a nodal component). Never a tree.
    pub fn component_cycle(s: usize) -> Self {
        assert!(s >= 1);
        let mut edges = Vec::new();
        let mut kinds = vec![VertexKind::Component; s];
        for i in 0..s {
            let point = s + i;
            edges.push((i, point));
            edges.push(((i + 1) % s, point));
            kinds.push(VertexKind::Point);
        }
        ReductionGraph {
            vertex_count: 2 * s,
            edges,
            bipartition: Some(kinds),
        }
    }

    pub fn betti1(&self) -> Result<i64, Error> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(self.edges.len() as i64 - self.vertex_count as i64 + 1)
    }

    /// True iff the connected graph has |E| = |V| - 1.
    pub fn is_tree(&self) -> Result<bool, Error> {
        Ok(self.betti1()? == 0)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut adjacency = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            if a >= self.vertex_count || b >= self.vertex_count {
                return false;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn validate_into(&self, path: &str, report: &mut ValidityReport) {
        if self.vertex_count == 0 {
            report.push(path, "graph must have at least one vertex".to_string());
            return;
        }
        for &(a, b) in &self.edges {
            if a >= self.vertex_count || b >= self.vertex_count {
                report.push(
                    path,
                    format!("edge ({a},{b}) references a vertex >= {}", self.vertex_count),
                );
                return;
            }
        }
        if !self.is_connected() {
            report.push(path, "graph must be connected".to_string());
        }
        if let Some(kinds) = &self.bipartition {
            if kinds.len() != self.vertex_count {
                report.push(path, "bipartition labels must cover every vertex".to_string());
            } else if self
                .edges
                .iter()
                .any(|&(a, b)| kinds[a] == kinds[b])
            {
                report.push(path, "bipartition labels must alternate along edges".to_string());
            }
        }
    }

    /// DOT rendering: stable vertex numbering, one line per edge. Component
    /// vertices are drawn as boxes when bipartition labels are present.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph reduction {\n");
        if let Some(kinds) = &self.bipartition {
            for (v, kind) in kinds.iter().enumerate() {
                let shape = match kind {
                    VertexKind::Component => "box",
                    VertexKind::Point => "circle",
                };
                let _ = writeln!(out, "  {v} [shape={shape}];");
            }
        } else {
            for v in 0..self.vertex_count {
                let _ = writeln!(out, "  {v};");
            }
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// One irreducible component of a regular model's closed fiber.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ComponentField {
    /// A general curve over the residue field; its anisotropic universal
    /// dimensions are pinned by the function-field hypothesis on the base.
    Leaf,
    /// A rational curve over the residue field.
    RationalLeaf,
    /// A component that is itself a semi-global field one Laurent layer
    /// down, presented by its own model.
    Nested(Model),
}

/// Regular-model data for a semi-global descriptor: the reduction graph
/// (explicit, or abbreviated to its tree flag) plus the component list.
/// When both the flag and an explicit graph are given they must agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Model {
    pub tree_flag: Option<bool>,
    pub graph: Option<ReductionGraph>,
    pub components: Vec<ComponentField>,
}

impl Model {
    pub fn with_tree_flag(tree: bool, components: Vec<ComponentField>) -> Self {
        Model {
            tree_flag: Some(tree),
            graph: None,
            components,
        }
    }

    pub fn with_graph(graph: ReductionGraph, components: Vec<ComponentField>) -> Self {
        Model {
            tree_flag: None,
            graph: Some(graph),
            components,
        }
    }

    /// Tree-ness of the reduction graph. The explicit graph wins when given.
    pub fn is_tree(&self) -> Result<bool, Error> {
        if let Some(g) = &self.graph {
            return g.is_tree();
        }
        self.tree_flag.ok_or(Error::DisconnectedGraph)
    }

    /// The reduction graph: the explicit one, or a canonical stand-in
    /// consistent with the tree flag and the component count.
    pub fn reduction_graph(&self) -> Result<ReductionGraph, Error> {
        if let Some(g) = &self.graph {
            return Ok(g.clone());
        }
        let s = self.components.len().max(1);
        match self.tree_flag {
            Some(true) => Ok(ReductionGraph::component_path(s)),
            Some(false) => Ok(ReductionGraph::component_cycle(s)),
            None => Err(Error::DisconnectedGraph),
        }
    }

    pub(crate) fn validate_into(
        &self,
        over: &FieldDescriptor,
        path: &str,
        report: &mut ValidityReport,
    ) {
        if self.components.is_empty() {
            report.push(
                &join(path, "components"),
                "component list must be non-empty".to_string(),
            );
        }
        match (&self.tree_flag, &self.graph) {
            (None, None) => {
                report.push(path, "model needs a tree flag or an explicit graph".to_string());
            }
            (flag, Some(g)) => {
                g.validate_into(&join(path, "graph"), report);
                if let (Some(flag), Ok(tree)) = (flag, g.is_tree()) {
                    if *flag != tree {
                        report.push(
                            path,
                            format!("tree flag {flag} disagrees with the explicit graph"),
                        );
                    }
                }
            }
            (Some(_), None) => {}
        }
        let residue = match over {
            FieldDescriptor::Cdvf(residue) => Some(residue.as_ref()),
            _ => None,
        };
        for (i, c) in self.components.iter().enumerate() {
            if let ComponentField::Nested(inner) = c {
                let comp_path = join(path, &format!("components[{i}]"));
                match residue {
                    Some(residue) if residue.is_cdvf_shaped() => {
                        inner.validate_into(residue, &comp_path, report);
                    }
                    _ => report.push(
                        &comp_path,
                        "nested component requires the over-field to have a Cdvf residue"
                            .to_string(),
                    ),
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rooted component trees
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub color: Color,
    pub level: u32,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// The black/white rooted tree describing a semi-global field: the root is
/// the field itself (black iff its reduction graph is not a tree), children
/// are the component fields, and leaves are white placeholder vertices for
/// unnested components.
#[derive(Debug, Clone, Default)]
pub struct RootedComponentTree {
    nodes: Vec<TreeNode>,
}

impl RootedComponentTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    /// The minimal level of a black vertex; infinite when every vertex is
    /// white (the fully arboreal case).
    pub fn layer(&self) -> InvariantValue {
        self.nodes
            .iter()
            .filter(|n| n.color == Color::Black)
            .map(|n| n.level as u64)
            .min()
            .map_or(InvariantValue::Infinite, InvariantValue::Finite)
    }

    fn add_node(&mut self, color: Color, level: u32, parent: Option<usize>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(TreeNode {
            color,
            level,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            self.nodes[p].children.push(idx);
        }
        idx
    }
}

/// Builds the rooted component tree of a valid semi-global descriptor.
pub fn build_component_tree(f: &FieldDescriptor) -> Result<RootedComponentTree, Error> {
    f.ensure_valid()?;
    let FieldDescriptor::SemiGlobal { over, model } = f else {
        return Err(Error::NotSemiGlobal { got: f.to_string() });
    };
    let mut tree = RootedComponentTree::default();
    build_tree_rec(over, model, 1, None, &mut tree)?;
    Ok(tree)
}

fn build_tree_rec(
    over: &FieldDescriptor,
    model: &Model,
    level: u32,
    parent: Option<usize>,
    tree: &mut RootedComponentTree,
) -> Result<usize, Error> {
    let color = if model.is_tree()? {
        Color::White
    } else {
        Color::Black
    };
    let idx = tree.add_node(color, level, parent);
    let residue = match over {
        FieldDescriptor::Cdvf(residue) => residue.as_ref(),
        _ => unreachable!("validated semi-global over-field is Cdvf-shaped"),
    };
    for c in &model.components {
        match c {
            // A leaf stands for a component whose own model is unspecified;
            // it is colored white, with blackness below the root always
            // expressed through an explicit nested model.
            ComponentField::Leaf | ComponentField::RationalLeaf => {
                tree.add_node(Color::White, level + 1, Some(idx));
            }
            ComponentField::Nested(inner) => {
                build_tree_rec(residue, inner, level + 1, Some(idx), tree)?;
            }
        }
    }
    Ok(idx)
}

/// The layer of a semi-global descriptor: minimal black level of its rooted
/// component tree, infinite when fully arboreal.
pub fn layer(f: &FieldDescriptor) -> Result<InvariantValue, Error> {
    Ok(build_component_tree(f)?.layer())
}

/// The m-invariant computed along the layer route: 2^layer when some vertex
/// is black, and 2^{n+1} · m_s(foot) for a fully arboreal field over an
/// n-local tower.
pub fn m_from_layer(f: &FieldDescriptor) -> Result<InvariantValue, Error> {
    let tree = build_component_tree(f)?;
    let base = f.bottom_base();
    if !base.fnfield_hypothesis() {
        return Err(Error::HypothesisRequired {
            base: base.to_string(),
        });
    }
    let FieldDescriptor::SemiGlobal { over, .. } = f else {
        unreachable!("checked by build_component_tree");
    };
    match tree.layer() {
        InvariantValue::Finite(j) => {
            debug_assert!(j <= over.cdvf_depth() as u64);
            Ok(InvariantValue::Finite(1 << j))
        }
        InvariantValue::Infinite => {
            let n = over.cdvf_depth();
            let foot = over.tower_foot().ms_us()?;
            Ok(InvariantValue::Finite((1 << (n + 1)) * foot))
        }
    }
}

// ---------------------------------------------------------------------------
// Attainable AU sets and witness models
// ---------------------------------------------------------------------------

/// All AU sets attainable by semi-global fields over an n-local tower over
/// the given base, enumerated level by level: each set one level up is a
/// union of self-sumsets of sets from the level below over a non-empty
/// selection of components, optionally joined with {2} for a non-tree root.
pub fn attainable_au(n: u32, base: BaseClass) -> Result<BTreeSet<AuSet>, Error> {
    if !base.fnfield_hypothesis() {
        return Err(Error::HypothesisRequired {
            base: base.to_string(),
        });
    }
    if n < 1 {
        return Err(Error::Unsupported(
            "attainable_au needs a positive tower depth".into(),
        ));
    }
    if base.exponent() > crate::descriptor::MAX_CDVF_DEPTH {
        return Err(Error::Unsupported(format!(
            "base exponent {} exceeds the supported maximum of {}",
            base.exponent(),
            crate::descriptor::MAX_CDVF_DEPTH
        )));
    }
    let top = 1u64 << (base.exponent() + 2);
    let mut level: BTreeSet<AuSet> = BTreeSet::new();
    level.insert(AuSet::singleton(top));
    level.insert([2, top].into_iter().collect());
    for _ in 2..=n {
        let sumsets: Vec<AuSet> = level.iter().map(AuSet::sumset).collect();
        if sumsets.len() > 20 {
            return Err(Error::BudgetExceeded {
                what: format!(
                    "attainable level holds {} sets; subset enumeration is infeasible",
                    sumsets.len()
                ),
            });
        }
        let mut next = BTreeSet::new();
        for mask in 1u64..(1 << sumsets.len()) {
            let mut u = AuSet::default();
            for (i, s) in sumsets.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    u.union_with(s);
                }
            }
            let mut with_loop = u.clone();
            with_loop.insert(2);
            next.insert(u);
            next.insert(with_loop);
        }
        level = next;
    }
    Ok(level)
}

/// A semi-global descriptor over an n-local tower with layer exactly `j`:
/// a chain of j-1 single-component tree models ending in a non-tree model
/// of two components meeting at two points.
pub fn make_layer_example(n: u32, j: u32, base: BaseClass) -> Result<FieldDescriptor, Error> {
    if j < 1 || j > n {
        return Err(Error::LayerOutOfRange { j, n });
    }
    if n > crate::descriptor::MAX_CDVF_DEPTH {
        return Err(Error::Unsupported(format!(
            "tower depth {n} exceeds the supported maximum of {}",
            crate::descriptor::MAX_CDVF_DEPTH
        )));
    }
    let over = FieldDescriptor::cdvf_tower(FieldDescriptor::base(base), n);
    Ok(FieldDescriptor::semi_global(over, layer_model_chain(j)))
}

fn layer_model_chain(steps: u32) -> Model {
    if steps == 1 {
        Model::with_graph(
            ReductionGraph::two_components_two_points(),
            vec![ComponentField::Leaf, ComponentField::Leaf],
        )
    } else {
        Model::with_tree_flag(
            true,
            vec![ComponentField::Nested(layer_model_chain(steps - 1))],
        )
    }
}

// ---------------------------------------------------------------------------
