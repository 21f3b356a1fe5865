//! Acceptance suite: the headline examples with their exact expected
//! invariants and wall-clock budgets. Each criterion prints one PASS/FAIL
//! line; run with `--nocapture` to see them all.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use linkcw_core::complex::{forget_projection, CellComplex};
use linkcw_core::linkage::parse_lengths;
use linkcw_core::partition::CyclicPartition;
use linkcw_core::polytope::{
    cyclic_facets, equilateral_facet_duality_check, long_edge_anti_isomorphism_check,
};
use linkcw_core::realization::{generators, surgery, verify_cell_realization, FaceOrigin};
use linkcw_core::verify::{run_suite, VerifyLevel};

fn check(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn run_criterion(
    number: usize,
    name: &str,
    budget: Duration,
    body: impl FnOnce() -> Result<(), String>,
) {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let within_budget = elapsed <= budget;
    match (&outcome, within_budget) {
        (Ok(()), true) => {
            println!("criterion {number} ({name}): PASS [{elapsed:.2?}]");
        }
        (Ok(()), false) => {
            println!(
                "criterion {number} ({name}): FAIL [over budget: {elapsed:.2?} > {budget:.2?}]"
            );
        }
        (Err(e), _) => {
            println!("criterion {number} ({name}): FAIL [{e}]");
        }
    }
    if let Err(e) = outcome {
        panic!("criterion {number} ({name}) failed: {e}");
    }
    assert!(
        within_budget,
        "criterion {number} ({name}) over budget: {elapsed:.2?} > {budget:.2?}"
    );
}

#[test]
fn criterion_1_two_circles() {
    run_criterion(1, "two circles", Duration::from_secs(1), || {
        let k =
            CellComplex::build(&parse_lengths("1,1,1,1/2").unwrap()).map_err(|e| e.to_string())?;
        check(k.f_vector() == vec![6, 6], "f-vector != (6,6)")?;
        check(k.euler_characteristic() == 0, "chi != 0")?;
        check(k.connected_components() == 2, "components != 2")?;
        let betti = k.betti_mod2().map_err(|e| e.to_string())?;
        check(betti == vec![2, 2], "betti != (2,2)")
    });
}

#[test]
fn criterion_2_long_edge_sphere() {
    run_criterion(2, "long-edge sphere", Duration::from_secs(1), || {
        let k = CellComplex::build(&parse_lengths("1,1,1,1,7/2").unwrap())
            .map_err(|e| e.to_string())?;
        check(k.f_vector() == vec![14, 36, 24], "f-vector != (14,36,24)")?;
        check(k.euler_characteristic() == 2, "chi != 2")?;
        let betti = k.betti_mod2().map_err(|e| e.to_string())?;
        check(betti == vec![1, 0, 1], "betti != (1,0,1)")?;
        check(
            long_edge_anti_isomorphism_check(&k).map_err(|e| e.to_string())?,
            "poset is not anti-isomorphic to the permutohedron lattice",
        )
    });
}

#[test]
fn criterion_3_genus_four() {
    run_criterion(3, "genus-4 surface", Duration::from_secs(1), || {
        let k =
            CellComplex::build(&parse_lengths("1,1,1,1,1").unwrap()).map_err(|e| e.to_string())?;
        check(k.f_vector() == vec![30, 60, 24], "f-vector != (30,60,24)")?;
        check(k.facets().len() == 24, "facet count != 24")?;
        let vertex_sets = k.closure_vertex_sets();
        for facet in k.facets() {
            check(
                k.faces_of(facet.id).len() == 5,
                "a facet does not have 5 edges",
            )?;
            check(
                vertex_sets[facet.id].len() == 5,
                "a facet does not have 5 vertices",
            )?;
        }
        let top = k.top_dim();
        for v in k.cells_of_dim(0) {
            let above = k.upper_interval(v.id);
            let facets = above.iter().filter(|&&c| k.cell(c).dim == top).count();
            let edges = above.iter().filter(|&&c| k.cell(c).dim == 1).count();
            check(facets == 4, "a vertex is not in exactly 4 facets")?;
            check(edges == 4, "a vertex is not in exactly 4 edges")?;
        }
        check(k.euler_characteristic() == -6, "chi != -6")?;
        let betti = k.betti_mod2().map_err(|e| e.to_string())?;
        check(betti == vec![1, 8, 1], "betti != (1,8,1)")?;
        check(k.connected_components() == 1, "not connected")
    });
}

#[test]
fn criterion_4_torus_surgery() {
    run_criterion(4, "torus surgery", Duration::from_secs(2), || {
        let k = CellComplex::build(&parse_lengths("1.2,1,1,0.8,2.2").unwrap())
            .map_err(|e| e.to_string())?;
        check(k.euler_characteristic() == 0, "chi != 0")?;
        let betti = k.betti_mod2().map_err(|e| e.to_string())?;
        check(betti == vec![1, 2, 1], "betti != (1,2,1)")?;

        let geometry = surgery(&k).map_err(|e| e.to_string())?;
        // Exactly the two hexagonal facets are removed.
        check(geometry.removed.len() == 2, "removed face count != 2")?;
        let removed: BTreeSet<(usize, Vec<Vec<usize>>)> = geometry
            .removed
            .iter()
            .map(|r| (r.dim, r.label.clone()))
            .collect();
        let expected_removed: BTreeSet<(usize, Vec<Vec<usize>>)> = BTreeSet::from([
            (2, vec![vec![1, 2, 3], vec![4]]),
            (2, vec![vec![4], vec![1, 2, 3]]),
        ]);
        check(removed == expected_removed, "removed faces differ")?;
        // Both are hexagons: the permutohedron face of a 3+1 split has
        // 3! * 1! vertices.
        let lattice = linkcw_core::polytope::PermutohedronLattice::new(4).unwrap();
        for r in &geometry.removed {
            let face = linkcw_core::polytope::OrderedPartition::new(r.label.clone());
            check(
                lattice.vertices_below(&face) == 6,
                "a removed face is not hexagonal",
            )?;
        }

        // Exactly the six listed cells are patched along the seam; the six
        // quadrilaterals they bound carry the part {4,5}.
        let listed = [
            "1|2|3|4,5",
            "1|3|2|4,5",
            "2|1|3|4,5",
            "2|3|1|4,5",
            "3|1|2|4,5",
            "3|2|1|4,5",
        ];
        for text in listed {
            let label = CyclicPartition::parse(text, 5).unwrap();
            let face = geometry
                .faces
                .iter()
                .find(|f| f.label == label)
                .ok_or_else(|| format!("cell {text} missing from surgery output"))?;
            check(
                face.origin == FaceOrigin::Patched,
                "a listed cell was not patched",
            )?;
        }
        let patched_quads: Vec<_> = geometry
            .faces
            .iter()
            .filter(|f| f.dim == 2 && f.origin == FaceOrigin::Patched)
            .collect();
        check(patched_quads.len() == 6, "patched 2-face count != 6")?;
        for quad in &patched_quads {
            check(quad.vertices.len() == 4, "a patched 2-face is not a quad")?;
            check(
                quad.label.last_part() == [4, 5],
                "a patched quad does not carry the part {4,5}",
            )?;
        }

        let off = geometry.to_off().map_err(|e| e.to_string())?;
        let header: Vec<usize> = off
            .lines()
            .nth(1)
            .ok_or("OFF header missing")?
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        check(header[0] == 24, "OFF vertex count != 24")?;
        check(header[1] == 18, "OFF 2-face count != 18")
    });
}

#[test]
fn criterion_5_hexagonal_diagonal_face() {
    run_criterion(5, "hexagonal diagonal face", Duration::from_secs(1), || {
        let linkage = parse_lengths("3,1,1,4,4").unwrap();
        let k = CellComplex::build(&linkage).map_err(|e| e.to_string())?;
        let label = CyclicPartition::parse("1|4|2,3,5", 5).unwrap();
        let cell = k.lookup(&label).ok_or("cell not found")?;

        let gens = generators(&label);
        check(gens.positives == vec![(2, 3)], "positives != {Q_23}")?;
        check(gens.negatives == vec![2, 3], "negatives != {R_2, R_3}")?;

        check(
            verify_cell_realization(&k, cell).map_err(|e| e.to_string())?,
            "zonotope vertices do not match the psi-images up to translation",
        )?;

        let geometry = surgery(&k).map_err(|e| e.to_string())?;
        let face = geometry
            .faces
            .iter()
            .find(|f| f.label == label)
            .ok_or("face missing")?;
        check(face.vertices.len() == 6, "face is not a hexagon")?;
        check(face.dim == 2, "face is not 2-dimensional")
    });
}

#[test]
fn criterion_6_cyclic_polytope_duality() {
    run_criterion(
        6,
        "cyclic polytope duality",
        Duration::from_secs(30),
        || {
            let k5 = CellComplex::build(&parse_lengths("1,1,1,1,1").unwrap())
                .map_err(|e| e.to_string())?;
            check(
                equilateral_facet_duality_check(&k5).map_err(|e| e.to_string())?,
                "n=5 facet duality fails",
            )?;

            let k7 = CellComplex::build(&parse_lengths("1,1,1,1,1,1,1").unwrap())
                .map_err(|e| e.to_string())?;
            check(
                equilateral_facet_duality_check(&k7).map_err(|e| e.to_string())?,
                "n=7 facet duality fails",
            )?;

            let c53 = cyclic_facets(5, 3).map_err(|e| e.to_string())?;
            let expected = vec![
                vec![1, 2, 3],
                vec![1, 2, 5],
                vec![1, 3, 4],
                vec![1, 4, 5],
                vec![2, 3, 5],
                vec![3, 4, 5],
            ];
            check(c53.facets == expected, "C(5,3) facet list differs")
        },
    );
}

#[test]
fn criterion_7_property_suite() {
    run_criterion(7, "property suite", Duration::from_secs(300), || {
        let linkages = [
            "3,4,5",
            "1,1,1,1/2",
            "2,1,1,1",
            "1,1,1,1,1",
            "1.2,1,1,0.8,2.2",
            "1,1,1,1,7/2",
            "3,1,1,4,4",
            "1,1,1,1,1,4",
            "1,2,2,3,3,4",
        ];
        for text in linkages {
            let linkage = parse_lengths(text).unwrap();
            assert!(
                linkage.is_generic().unwrap(),
                "test fixture {text} not generic"
            );
            let k = CellComplex::build(&linkage).map_err(|e| e.to_string())?;
            let report = run_suite(&k, VerifyLevel::Full);
            if let Some(first) = report.first_failure() {
                return Err(format!(
                    "linkage {text}: check {} failed: {}",
                    first.name, first.detail
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_8_forgetting_projection() {
    run_criterion(8, "forgetting projection", Duration::from_secs(2), || {
        let base =
            CellComplex::build(&parse_lengths("1,1,1,1/2").unwrap()).map_err(|e| e.to_string())?;
        let extended = CellComplex::build(&parse_lengths("1,1,1,1/2,1/100").unwrap())
            .map_err(|e| e.to_string())?;
        // forget_projection verifies well-definedness and monotonicity.
        let map = forget_projection(&extended, &base).map_err(|e| e.to_string())?;
        check(map.len() == extended.cell_count(), "map not total")?;
        let image: BTreeSet<usize> = extended.facets().iter().map(|f| map[f.id]).collect();
        for facet in base.facets() {
            check(image.contains(&facet.id), "projection misses a base facet")?;
        }
        Ok(())
    });
}
