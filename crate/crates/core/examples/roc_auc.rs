//! ROC curves and AUC, with ties.

use symlatent::eval::{auc_pairwise, roc_from_scores, AucTable};
use symlatent::model::ModelKind;

fn main() -> symlatent::Result<()> {
    let scores = [0.1, 0.4, 0.35, 0.8, 0.4, 0.9];
    let truth = [false, false, true, true, true, false];
    let roc = roc_from_scores(&scores, &truth)?;
    for (fpr, tpr) in &roc.points {
        println!("fpr {fpr:.3}  tpr {tpr:.3}");
    }
    println!("trapezoid AUC {:.4}", roc.auc);
    println!("pairwise AUC  {:.4}", auc_pairwise(&scores, &truth)?);

    let mut table = AucTable::new(vec!["toy".into()], ModelKind::ALL.to_vec(), vec![3]);
    table.set(3, "toy", ModelKind::Eigen, roc.auc);
    print!("{}", table.to_csv());
    Ok(())
}
