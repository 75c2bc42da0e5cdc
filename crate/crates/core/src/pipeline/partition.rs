use crate::error::{Error, Result};
use crate::logic::{exec_strict, Instance, LogicalForm};

/// A strict-matched instance with the label of the form that claimed it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub instance: Instance,
    pub label: String,
    pub form_id: String,
}

/// Strict-matched part `labeled` and the rest `unlabeled`, both in corpus order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Partition {
    pub labeled: Vec<LabeledInstance>,
    pub unlabeled: Vec<Instance>,
    /// Instances matched by forms that disagree on the label.
    pub conflicts: usize,
}

impl Partition {
    pub fn n_labeled(&self) -> usize {
        self.labeled.len()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled.len()
    }
}

/// Strict match that treats a reference to an absent anchor as "no match".
pub fn strict_matches(form: &LogicalForm, x: &Instance) -> Result<bool> {
    match exec_strict(form.root(), x) {
        Ok(b) => Ok(b),
        Err(Error::AnchorMissing(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Splits a corpus by exact matching. An instance matched by several forms
/// takes the label of the first of them in `forms`; if their labels differ
/// it also counts as a conflict.
pub fn partition_corpus(corpus: &[Instance], forms: &[LogicalForm]) -> Result<Partition> {
    let mut p = Partition::default();
    for x in corpus {
        let mut first: Option<&LogicalForm> = None;
        let mut conflict = false;
        for f in forms {
            if strict_matches(f, x)? {
                match first {
                    None => first = Some(f),
                    Some(g) if g.label() != f.label() => conflict = true,
                    Some(_) => {}
                }
            }
        }
        match first {
            Some(f) => {
                p.conflicts += conflict as usize;
                p.labeled.push(LabeledInstance {
                    instance: x.clone(),
                    label: f.label().to_string(),
                    form_id: f.id.clone(),
                });
            }
            None => p.unlabeled.push(x.clone()),
        }
    }
    Ok(p)
}
