use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{check_len, EdgeVector, FlowSpace};
use crate::graph::{Digraph, Vertex};
use crate::group::{Element, Group};

/// True iff no flow avoids `h` on every edge, checked by exhaustive search
/// over the flow space.
pub fn verify_certificate(g: &Digraph, group: &Group, h: &[Element]) -> Result<bool> {
    check_len(g, h)?;
    Ok(FlowSpace::new(g, group).find_satisfying(h)?.is_none())
}

/// One edge of a certificate as written to JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub tail: Vertex,
    pub head: Vertex,
    pub forbidden: String,
}

pub fn certificate_entries(g: &Digraph, group: &Group, h: &[Element]) -> Result<Vec<CertificateEntry>> {
    check_len(g, h)?;
    Ok(g.edges()
        .iter()
        .zip(h)
        .map(|(&(tail, head), &a)| CertificateEntry { tail, head, forbidden: group.format_element(a) })
        .collect())
}

/// Reads a mapping back; entries must list the graph's edges in order.
pub fn mapping_from_entries(g: &Digraph, group: &Group, entries: &[CertificateEntry]) -> Result<EdgeVector> {
    if entries.len() != g.edge_count() {
        return Err(Error::Certificate(format!("{} entries for {} edges", entries.len(), g.edge_count())));
    }
    entries
        .iter()
        .enumerate()
        .map(|(e, entry)| {
            if (entry.tail, entry.head) != g.edge(e) {
                let (u, v) = g.edge(e);
                return Err(Error::Certificate(format!(
                    "entry {e} is ({}, {}) but edge {e} is ({u}, {v})",
                    entry.tail, entry.head
                )));
            }
            group.parse_element(&entry.forbidden)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_examples() {
        let z4 = Group::z4();
        assert!(verify_certificate(&Digraph::cycle(4), &z4, &[0, 1, 2, 3]).unwrap());
        // Reversing an edge and negating its value keeps the certificate valid.
        assert!(verify_certificate(&Digraph::cycle(4).reversed(1), &z4, &[0, 3, 2, 3]).unwrap());
        for h in [[0, 0, 0], [1, 2, 3], [3, 3, 0]] {
            assert!(!verify_certificate(&Digraph::cycle(3), &z4, &h).unwrap());
        }
        assert!(verify_certificate(&Digraph::cycle(3), &z4, &[0, 0]).is_err());
    }

    #[test]
    fn entries_round_trip() {
        let g = Digraph::complete(4);
        let group = Group::z2_squared();
        let h = vec![0, 1, 2, 3, 1, 2];
        let entries = certificate_entries(&g, &group, &h).unwrap();
        assert_eq!(entries[3], CertificateEntry { tail: 0, head: 3, forbidden: "(1,1)".into() });
        assert_eq!(mapping_from_entries(&g, &group, &entries).unwrap(), h);

        let mut wrong = entries.clone();
        wrong[2].tail = 2;
        assert!(mapping_from_entries(&g, &group, &wrong).is_err());
        assert!(mapping_from_entries(&g, &group, &entries[1..]).is_err());
        let mut bad_value = entries;
        bad_value[0].forbidden = "(2,0)".into();
        assert!(mapping_from_entries(&g, &group, &bad_value).is_err());
    }
}
