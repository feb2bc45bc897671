use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::VariableLayout;
use crate::scale::Partition;

/// Why an assignment block is not a binary staircase matrix. Counterpart and
/// grade indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum StructuralIssue {
    EmptyRow { counterpart: usize },
    MultipleAssignment { counterpart: usize, grades: Vec<usize> },
    /// The counterpart sits in a lower grade than its predecessor.
    ColumnOrderViolation { counterpart: usize },
    EmptyGrade { grade: usize },
    WrongFirstGrade,
    WrongLastGrade,
}

impl fmt::Display for StructuralIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralIssue::EmptyRow { counterpart } => write!(f, "counterpart {} has no grade", counterpart + 1),
            StructuralIssue::MultipleAssignment { counterpart, grades } => {
                let g: Vec<String> = grades.iter().map(|g| (g + 1).to_string()).collect();
                write!(f, "counterpart {} is in grades {}", counterpart + 1, g.join(","))
            }
            StructuralIssue::ColumnOrderViolation { counterpart } => {
                write!(f, "counterpart {} is graded below its predecessor", counterpart + 1)
            }
            StructuralIssue::EmptyGrade { grade } => write!(f, "grade {} is empty", grade + 1),
            StructuralIssue::WrongFirstGrade => f.write_str("first counterpart is not in grade 1"),
            StructuralIssue::WrongLastGrade => f.write_str("last counterpart is not in the last grade"),
        }
    }
}

/// Every structural defect of the assignment block, in the order rows,
/// ordering, empty grades, endpoints. Empty means the block is a staircase.
pub fn diagnose(state: &[bool], layout: &VariableLayout) -> Result<Vec<StructuralIssue>> {
    if state.len() != layout.total_variables() {
        return Err(Error::StateLength {
            expected: layout.total_variables(),
            actual: state.len(),
        });
    }
    let (n, m) = (layout.counterparts(), layout.grades());
    let mut issues = Vec::new();
    let mut grade_of = vec![None; n];
    for (i, slot) in grade_of.iter_mut().enumerate() {
        let set: Vec<usize> = (0..m).filter(|&j| state[layout.x(i, j)]).collect();
        match set.len() {
            0 => issues.push(StructuralIssue::EmptyRow { counterpart: i }),
            1 => *slot = Some(set[0]),
            _ => issues.push(StructuralIssue::MultipleAssignment {
                counterpart: i,
                grades: set,
            }),
        }
    }
    let mut last = None;
    for (i, g) in grade_of.iter().enumerate() {
        if let Some(g) = *g {
            if last.is_some_and(|prev| g < prev) {
                issues.push(StructuralIssue::ColumnOrderViolation { counterpart: i });
            }
            last = Some(g);
        }
    }
    for j in 0..m {
        if !(0..n).any(|i| state[layout.x(i, j)]) {
            issues.push(StructuralIssue::EmptyGrade { grade: j });
        }
    }
    if !state[layout.x(0, 0)] {
        issues.push(StructuralIssue::WrongFirstGrade);
    }
    if !state[layout.x(n - 1, m - 1)] {
        issues.push(StructuralIssue::WrongLastGrade);
    }
    Ok(issues)
}

/// Reads the partition encoded by the assignment block; auxiliary bits are
/// ignored. Fails with the full diagnosis when the block is not a staircase.
pub fn decode(state: &[bool], layout: &VariableLayout) -> Result<Partition> {
    let issues = diagnose(state, layout)?;
    if !issues.is_empty() {
        return Err(Error::NotStaircase(issues));
    }
    let m = layout.grades();
    let mut sizes = vec![0; m];
    for i in 0..layout.counterparts() {
        let j = (0..m).find(|&j| state[layout.x(i, j)]).expect("rows checked");
        sizes[j] += 1;
    }
    Partition::new(sizes)
}
