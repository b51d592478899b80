//! Structural violations collected by the validators.
//!
//! Validators never stop at the first problem: they return every violation
//! they find, and an empty report means the input is valid.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    // substitution system
    UnknownPrototype {
        rule: String,
        what: String,
    },
    SlotOutOfRange {
        rule: String,
        slot: String,
    },
    SlotPairedTwice {
        rule: String,
        slot: String,
    },
    OrientationMismatch {
        rule: String,
        a: String,
        b: String,
    },
    EmptyTemplate {
        rule: String,
    },
    DisconnectedTemplate {
        rule: String,
        components: usize,
    },
    GammaArity {
        rule: String,
        expected: usize,
        found: usize,
    },
    GammaEmpty {
        rule: String,
        facet: usize,
    },
    GammaNotExternal {
        rule: String,
        facet: usize,
        slot: String,
    },
    GammaOverlap {
        rule: String,
        facets: (usize, usize),
        slot: String,
    },
    MacroAdjacencyUnknown {
        entry: String,
    },
    MacroAdjacencyMap {
        entry: String,
        reason: String,
    },
    MacroAdjacencyOrientation {
        entry: String,
        position: (usize, usize),
    },
    MacroAdjacencyAsymmetric {
        entry: String,
    },

    // networks
    BranchCount {
        rule: String,
        expected: usize,
        found: usize,
    },
    CenterNotInterior {
        rule: String,
        center: String,
    },
    BranchEmpty {
        rule: String,
        branch: usize,
    },
    BranchBroken {
        rule: String,
        branch: usize,
        from: String,
        to: String,
    },
    BranchesOverlap {
        rule: String,
        cell: String,
    },
    PortNotOwnedByLeaf {
        rule: String,
        branch: usize,
        port: String,
    },
    PortNotInMacroFacet {
        rule: String,
        branch: usize,
        port: String,
    },
    MacroFacetAllPorts {
        rule: String,
        facet: usize,
    },
    ResidualDisconnected {
        rule: String,
        components: usize,
    },
    SecondNetworkDisconnected {
        rule: String,
    },
    SecondNetworkMissesMacroFacet {
        rule: String,
        facet: usize,
    },
    SecondNetworkCrossings {
        rule: String,
        reason: String,
    },
    BranchUncrossed {
        rule: String,
        branch: usize,
    },

    // port condition
    MissingNetwork {
        rule: String,
    },
    NoAdjacency,
    PortMisaligned {
        entry: String,
        reason: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownPrototype { rule, what } => write!(f, "UnknownPrototype rule={rule} {what}"),
            SlotOutOfRange { rule, slot } => write!(f, "SlotOutOfRange rule={rule} slot={slot}"),
            SlotPairedTwice { rule, slot } => write!(f, "SlotPairedTwice rule={rule} slot={slot}"),
            OrientationMismatch { rule, a, b } => {
                write!(f, "OrientationMismatch rule={rule} {a} -- {b}")
            }
            EmptyTemplate { rule } => write!(f, "EmptyTemplate rule={rule}"),
            DisconnectedTemplate { rule, components } => {
                write!(
                    f,
                    "DisconnectedTemplate rule={rule} components={components}"
                )
            }
            GammaArity {
                rule,
                expected,
                found,
            } => {
                write!(
                    f,
                    "GammaArity rule={rule} expected={expected} found={found}"
                )
            }
            GammaEmpty { rule, facet } => write!(f, "GammaEmpty rule={rule} facet={facet}"),
            GammaNotExternal { rule, facet, slot } => {
                write!(f, "GammaNotExternal rule={rule} facet={facet} slot={slot}")
            }
            GammaOverlap { rule, facets, slot } => write!(
                f,
                "GammaOverlap rule={rule} facets={},{} slot={slot}",
                facets.0, facets.1
            ),
            MacroAdjacencyUnknown { entry } => write!(f, "MacroAdjacencyUnknown {entry}"),
            MacroAdjacencyMap { entry, reason } => write!(f, "MacroAdjacencyMap {entry}: {reason}"),
            MacroAdjacencyOrientation { entry, position } => write!(
                f,
                "MacroAdjacencyOrientation {entry} at {}:{}",
                position.0, position.1
            ),
            MacroAdjacencyAsymmetric { entry } => write!(f, "MacroAdjacencyAsymmetric {entry}"),
            BranchCount {
                rule,
                expected,
                found,
            } => {
                write!(
                    f,
                    "BranchCount rule={rule} expected={expected} found={found}"
                )
            }
            CenterNotInterior { rule, center } => {
                write!(f, "CenterNotInterior rule={rule} center={center}")
            }
            BranchEmpty { rule, branch } => write!(f, "BranchEmpty rule={rule} branch={branch}"),
            BranchBroken {
                rule,
                branch,
                from,
                to,
            } => {
                write!(f, "BranchBroken rule={rule} branch={branch} {from}->{to}")
            }
            BranchesOverlap { rule, cell } => write!(f, "BranchesOverlap rule={rule} cell={cell}"),
            PortNotOwnedByLeaf { rule, branch, port } => {
                write!(
                    f,
                    "PortNotOwnedByLeaf rule={rule} branch={branch} port={port}"
                )
            }
            PortNotInMacroFacet { rule, branch, port } => {
                write!(
                    f,
                    "PortNotInMacroFacet rule={rule} branch={branch} port={port}"
                )
            }
            MacroFacetAllPorts { rule, facet } => {
                write!(f, "MacroFacetAllPorts rule={rule} facet={facet}")
            }
            ResidualDisconnected { rule, components } => {
                write!(
                    f,
                    "ResidualDisconnected rule={rule} components={components}"
                )
            }
            SecondNetworkDisconnected { rule } => {
                write!(f, "SecondNetworkDisconnected rule={rule}")
            }
            SecondNetworkMissesMacroFacet { rule, facet } => {
                write!(f, "SecondNetworkMissesMacroFacet rule={rule} facet={facet}")
            }
            SecondNetworkCrossings { rule, reason } => {
                write!(f, "SecondNetworkCrossings rule={rule}: {reason}")
            }
            BranchUncrossed { rule, branch } => {
                write!(f, "BranchUncrossed rule={rule} branch={branch}")
            }
            MissingNetwork { rule } => write!(f, "MissingNetwork rule={rule}"),
            NoAdjacency => write!(f, "NoAdjacency"),
            PortMisaligned { entry, reason } => write!(f, "PortMisaligned {entry}: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Informational findings that do not make the input invalid.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, violation: Violation) {
        self.violations.push(violation);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
