//! Parser and printer for the plain-text algorithm format.
//!
//! One step per line, one operation per topology section, sections separated
//! by `|`. Operations are `I<j>,<k>` (memristor j implies memristor k),
//! `F<j>[,<k>[,<l>]]` (reset up to three memristors) or `NOP`. Lines starting
//! with `#` and blank lines are ignored; whitespace inside tokens is ignored.

use crate::error::SpecError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionOp {
    Imply { src: usize, dst: usize },
    False(Vec<usize>),
    Nop,
}

impl SectionOp {
    /// Memristor indices touched by this operation.
    pub fn devices(&self) -> Vec<usize> {
        match self {
            SectionOp::Imply { src, dst } => vec![*src, *dst],
            SectionOp::False(targets) => targets.clone(),
            SectionOp::Nop => Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            SectionOp::Imply { src, dst } => format!("I{src},{dst}"),
            SectionOp::False(targets) => {
                let list: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
                format!("F{}", list.join(","))
            }
            SectionOp::Nop => "NOP".to_string(),
        }
    }
}

/// A parsed algorithm: an ordered list of steps, each holding exactly one
/// operation per topology section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmProgram {
    pub section_count: usize,
    pub steps: Vec<Vec<SectionOp>>,
}

impl AlgorithmProgram {
    pub fn parse(text: &str, section_count: usize) -> Result<Self, SpecError> {
        let mut steps = Vec::new();
        for (line_idx, raw_line) in text.lines().enumerate() {
            let line_no = line_idx + 1;
            let line = raw_line.trim_end_matches('\r');
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let sections: Vec<&str> = line.split('|').collect();
            if sections.len() != section_count {
                return Err(SpecError::SectionCountMismatch {
                    line: line_no,
                    expected: section_count,
                    got: sections.len(),
                });
            }
            let mut step = Vec::with_capacity(section_count);
            let mut col = 1usize;
            let mut seen: Vec<usize> = Vec::new();
            for sec in sections {
                let op = parse_op(sec, line_no, col)?;
                for dev in op.devices() {
                    if seen.contains(&dev) {
                        return Err(SpecError::DuplicateDeviceInStep {
                            line: line_no,
                            device: dev,
                        });
                    }
                    seen.push(dev);
                }
                step.push(op);
                col += sec.len() + 1;
            }
            steps.push(step);
        }
        if steps.is_empty() {
            return Err(SpecError::EmptyProgram);
        }
        Ok(AlgorithmProgram {
            section_count,
            steps,
        })
    }

    /// Render back to the text format. `parse(render())` is the identity.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let line: Vec<String> = step.iter().map(|op| op.render()).collect();
            out.push_str(&line.join(" | "));
            out.push('\n');
        }
        out
    }

    /// Highest memristor index referenced, if any operation references one.
    pub fn max_device_index(&self) -> Option<usize> {
        self.steps
            .iter()
            .flatten()
            .flat_map(|op| op.devices())
            .max()
    }
}

fn parse_op(sec: &str, line: usize, col: usize) -> Result<SectionOp, SpecError> {
    let compact: String = sec.chars().filter(|c| !c.is_whitespace()).collect();
    let malformed = || SpecError::MalformedToken {
        line,
        col,
        token: sec.trim().to_string(),
    };
    if compact == "NOP" {
        return Ok(SectionOp::Nop);
    }
    let mut chars = compact.chars();
    match chars.next() {
        Some('I') => {
            let indices = parse_indices(chars.as_str()).ok_or_else(malformed)?;
            if indices.len() != 2 {
                return Err(malformed());
            }
            let (src, dst) = (indices[0], indices[1]);
            if src == dst {
                return Err(SpecError::DuplicateDeviceInStep { line, device: src });
            }
            Ok(SectionOp::Imply { src, dst })
        }
        Some('F') => {
            let indices = parse_indices(chars.as_str()).ok_or_else(malformed)?;
            if indices.is_empty() || indices.len() > 3 {
                return Err(malformed());
            }
            for (i, a) in indices.iter().enumerate() {
                if indices[i + 1..].contains(a) {
                    return Err(SpecError::DuplicateDeviceInStep { line, device: *a });
                }
            }
            Ok(SectionOp::False(indices))
        }
        _ => Err(malformed()),
    }
}

fn parse_indices(s: &str) -> Option<Vec<usize>> {
    if s.is_empty() {
        return None;
    }
    s.split(',').map(|part| part.parse::<usize>().ok()).collect()
}
