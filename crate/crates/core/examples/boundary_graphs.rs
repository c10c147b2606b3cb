//! Decorated stable graphs: enumeration up to isomorphism, automorphism
//! kernels and DOT output.

use spinh::strata::{aut_order, enumerate_boundary_graphs, graph_genus, virtual_dim};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 3;
    let marks = [1, 1, 1, 1, 0];
    let graphs = enumerate_boundary_graphs(r, 0, &marks, 2, 10_000)?;
    println!("r = {r}, genus 0, marks {marks:?}: {} graphs", graphs.len());
    for g in &graphs {
        println!(
            "  {} vertices, {} edges, genus {}, |Aut| = {}",
            g.vertices.len(),
            g.edges.len(),
            graph_genus(g),
            aut_order(g)?
        );
    }
    println!("virtual dimension: {}", virtual_dim(r, 0, &marks, 1));
    if let Some(g) = graphs.iter().find(|g| g.edges.len() == 2) {
        println!("\n{}", g.to_dot());
    }
    Ok(())
}
