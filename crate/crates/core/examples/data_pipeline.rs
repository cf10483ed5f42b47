//! Loading relational data: edge lists, the largest component, and folds.

use symlatent::data::{
    assign_folds, format_edge_list, largest_connected_component, mask_fold, parse_edge_list,
    tokenize, tokenize_adjacency_counts,
};

const EDGES: &str = "\
# a triangle, a pendant, and a separate pair
ann\tbob
bob\tcat
cat\tann\t2
cat\tdan
eve\tfay
ann\teve\tNA
";

fn main() -> symlatent::Result<()> {
    // unlisted dyads count as observed zeros; NA marks a missing value
    let y = parse_edge_list(EDGES, 0)?;
    println!("{} nodes, {} of {} dyads observed", y.n(), y.observed_count(), y.dyad_count());

    let lcc = largest_connected_component(&y, 0)?;
    println!("largest component: {:?}", lcc.labels());
    print!("{}", format_edge_list(&lcc));

    let folds = assign_folds(&y, 3, 1)?;
    println!("fold sizes {:?}", folds.sizes());
    let train = mask_fold(&y, &folds, 1)?;
    println!("fold 1 hides {} dyads", y.observed_count() - train.observed_count());

    let verse = "And God said, Let there be light: and there was light.";
    println!("tokens: {:?}", tokenize(verse));
    let words = tokenize_adjacency_counts(verse)?;
    let (i, j) = (words.label_position("there").unwrap(), words.label_position("be").unwrap());
    println!("'there' next to 'be': {:?}", words.get(i, j)?);
    Ok(())
}
