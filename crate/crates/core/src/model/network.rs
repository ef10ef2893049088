use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    CompatibilityMatrix, Granularity, LinkId, MaturityRating, NetworkId, NodeId, OrgId,
};

/// Member of a collaboration network.
///
/// External actor groups (citizens, private sector, ...) carry `external: true`
/// and usually no maturity rating; they never take part in the potentiality
/// minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Organization {
    pub id: OrgId,
    pub name: String,
    #[serde(default)]
    pub external: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maturity: Option<MaturityRating>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Elementary,
    Composite,
}

/// An automated business process owned by one organization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessNode {
    pub id: NodeId,
    pub name: String,
    pub organization: OrgId,
    pub kind: ProcessKind,
    /// Sub-processes of a composite node, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exposed_services: Vec<String>,
}

/// An interface between two process nodes with its compatibility matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteropLink {
    pub id: LinkId,
    pub from_node: NodeId,
    pub to_node: NodeId,
    /// Free text, e.g. `ETL+BPEL` or `EDI`.
    pub mechanism: String,
    pub compatibility: CompatibilityMatrix,
}

/// The assessed scope: organizations, their processes and the interfaces
/// between those processes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollaborationNetwork {
    pub id: NetworkId,
    pub name: String,
    #[serde(default)]
    pub granularity: Granularity,
    /// Integrated, federated or unified. Informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approach: Option<String>,
    pub organizations: Vec<Organization>,
    #[serde(default)]
    pub processes: Vec<ProcessNode>,
    #[serde(default)]
    pub links: Vec<InteropLink>,
}

impl CollaborationNetwork {
    pub fn organization(&self, id: &OrgId) -> Option<&Organization> {
        self.organizations.iter().find(|o| &o.id == id)
    }

    pub fn organization_mut(&mut self, id: &OrgId) -> Option<&mut Organization> {
        self.organizations.iter_mut().find(|o| &o.id == id)
    }

    pub fn link(&self, id: &LinkId) -> Option<&InteropLink> {
        self.links.iter().find(|l| &l.id == id)
    }

    pub fn link_mut(&mut self, id: &LinkId) -> Option<&mut InteropLink> {
        self.links.iter_mut().find(|l| &l.id == id)
    }

    /// Organizations that count towards potentiality, in declaration order.
    pub fn internal_organizations(&self) -> impl Iterator<Item = &Organization> {
        self.organizations.iter().filter(|o| !o.external)
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        validate_network(self)
    }
}

/// One invariant violation, `path` locating the offending element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

pub fn validate_network(net: &CollaborationNetwork) -> ValidationReport {
    let mut report = ValidationReport::default();

    if !net.id.is_path_safe() {
        report.push("id", format!("network id {:?} must match [A-Za-z0-9._-]+", net.id.as_str()));
    }
    if net.organizations.is_empty() {
        report.push("organizations", "at least one organization is required");
    }

    let mut orgs: HashMap<&OrgId, &Organization> = HashMap::new();
    for org in &net.organizations {
        if orgs.insert(&org.id, org).is_some() {
            report.push(format!("organizations[{}]", org.id), "duplicate organization id");
        }
        if !org.external && org.maturity.is_none() {
            report.push(
                format!("organizations[{}].maturity", org.id),
                "internal organization has no maturity rating",
            );
        }
    }

    let mut nodes: HashMap<&NodeId, &ProcessNode> = HashMap::new();
    for node in &net.processes {
        if nodes.insert(&node.id, node).is_some() {
            report.push(format!("processes[{}]", node.id), "duplicate process id");
        }
        if !orgs.contains_key(&node.organization) {
            report.push(
                format!("processes[{}].organization", node.id),
                format!("unknown organization {}", node.organization),
            );
        }
    }

    for node in &net.processes {
        let path = format!("processes[{}].children", node.id);
        match node.kind {
            ProcessKind::Elementary if !node.children.is_empty() => {
                report.push(path, "elementary process cannot have children");
            }
            _ => {
                for child in &node.children {
                    if !nodes.contains_key(child) {
                        report.push(path.clone(), format!("unknown child process {child}"));
                    }
                }
            }
        }
    }
    for cycle in containment_cycles(&net.processes, &nodes) {
        let names: Vec<_> = cycle.iter().map(NodeId::as_str).collect();
        report.push(
            format!("processes[{}].children", cycle[0]),
            format!("containment cycle {}", names.join(" -> ")),
        );
    }

    let mut links = BTreeSet::new();
    for link in &net.links {
        if !links.insert(&link.id) {
            report.push(format!("links[{}]", link.id), "duplicate link id");
        }
        for (field, end) in [("from_node", &link.from_node), ("to_node", &link.to_node)] {
            if !nodes.contains_key(end) {
                report.push(
                    format!("links[{}].{field}", link.id),
                    format!("dangling reference to process {end}"),
                );
            }
        }
        if link.from_node == link.to_node {
            report.push(
                format!("links[{}]", link.id),
                "link endpoints must be distinct processes",
            );
        }
    }

    report
}

/// Cycles in the composite containment graph, each returned once starting
/// from the node where it was detected and closing on that node.
fn containment_cycles(
    processes: &[ProcessNode],
    nodes: &HashMap<&NodeId, &ProcessNode>,
) -> Vec<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }

    fn visit<'a>(
        id: &'a NodeId,
        nodes: &HashMap<&'a NodeId, &'a ProcessNode>,
        marks: &mut BTreeMap<&'a NodeId, Mark>,
        stack: &mut Vec<&'a NodeId>,
        cycles: &mut Vec<Vec<NodeId>>,
    ) {
        marks.insert(id, Mark::Active);
        stack.push(id);
        if let Some(node) = nodes.get(id) {
            for child in &node.children {
                match marks.get(child) {
                    Some(Mark::Active) => {
                        let start = stack.iter().position(|n| *n == child).unwrap_or(0);
                        let mut cycle: Vec<NodeId> =
                            stack[start..].iter().map(|n| (*n).clone()).collect();
                        cycle.push(child.clone());
                        cycles.push(cycle);
                    }
                    Some(Mark::Done) => {}
                    None if nodes.contains_key(child) => {
                        visit(child, nodes, marks, stack, cycles);
                    }
                    None => {}
                }
            }
        }
        stack.pop();
        marks.insert(id, Mark::Done);
    }

    let mut marks = BTreeMap::new();
    let mut cycles = Vec::new();
    for node in processes {
        if !marks.contains_key(&node.id) {
            visit(&node.id, nodes, &mut marks, &mut Vec::new(), &mut cycles);
        }
    }
    cycles
}
