//! Fixed structures where one hypothesis is dropped and the conclusion breaks.

use super::{run_suite, SuiteConfig};
use crate::axioms::{full_report, SamplingBudget, SchemaMode};
use crate::structure::{build_v_universe, scramble, DualStructure, MembershipRelation, Permutation};

#[derive(Clone, Debug)]
pub struct GalleryItem {
    pub name: &'static str,
    pub structure: DualStructure,
    /// Stored output of [`gallery_summary`].
    pub expected: &'static str,
}

/// Failing axiom lines (battery mode) followed by the suite report.
pub fn gallery_summary(s: &DualStructure) -> String {
    let axioms = full_report(s, &SamplingBudget::default(), SchemaMode::Battery).to_string();
    let mut out = String::new();
    for line in axioms.lines().filter(|l| l.split(' ').nth(2) == Some("fail")) {
        out.push_str("axiom ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&run_suite(s, &SuiteConfig::default()).to_string());
    out
}

fn relation(lists: &[&[usize]]) -> MembershipRelation {
    MembershipRelation::from_member_lists(lists.iter().map(|l| l.to_vec()).collect()).expect("fixed content")
}

fn scrambled_v3() -> DualStructure {
    let p = Permutation::transposition(4, 1, 2).expect("fixed content");
    scramble(&build_v_universe(3).expect("fixed content"), &p).expect("fixed content")
}

fn with_e1(s: DualStructure, e1: MembershipRelation) -> DualStructure {
    DualStructure::new(e1, s.e2().clone()).expect("fixed content")
}

/// (a) the chain `∅, {∅}, {{∅}}` against `V₃`; (b) scrambled `V₃` with two `∈₁` elements
/// given the same members; (c) scrambled `V₃` with an `∈₁` cycle; (d) `V₃` against the
/// ordinal 4, two rigid extensional relations of equal size.
pub fn counterexample_gallery() -> Vec<GalleryItem> {
    vec![
        GalleryItem {
            name: "chain-vs-v3",
            structure: DualStructure::new(relation(&[&[], &[0], &[1]]), relation(&[&[], &[0], &[0, 1]]))
                .expect("fixed content"),
            expected: include_str!("gallery/chain-vs-v3.txt"),
        },
        GalleryItem {
            name: "break-extensionality",
            structure: with_e1(scrambled_v3(), relation(&[&[], &[0], &[0], &[0, 1]])),
            expected: include_str!("gallery/break-extensionality.txt"),
        },
        GalleryItem {
            name: "add-cycle",
            structure: with_e1(scrambled_v3(), relation(&[&[3], &[0], &[1], &[0, 1]])),
            expected: include_str!("gallery/add-cycle.txt"),
        },
        GalleryItem {
            name: "v3-vs-ordinal-4",
            structure: DualStructure::new(
                relation(&[&[], &[0], &[1], &[0, 1]]),
                relation(&[&[], &[0], &[0, 1], &[0, 1, 2]]),
            )
            .expect("fixed content"),
            expected: include_str!("gallery/v3-vs-ordinal-4.txt"),
        },
    ]
}
