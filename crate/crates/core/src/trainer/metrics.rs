//! Intersection-over-union evaluation via an accumulated confusion matrix.

use crate::error::{Error, Result};
use crate::trainer::loss::LabelMap;

/// Square confusion matrix indexed `[gt][pred]`.
#[derive(Debug, Clone)]
pub struct ConfusionMatrix {
    num_classes: usize,
    counts: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct IouReport {
    /// `None` for classes absent from both prediction and ground truth.
    pub per_class: Vec<Option<f64>>,
    pub mean: f64,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        ConfusionMatrix { num_classes, counts: vec![0; num_classes * num_classes] }
    }

    pub fn add(&mut self, pred: &LabelMap, gt: &LabelMap) -> Result<()> {
        if pred.height != gt.height || pred.width != gt.width {
            return Err(Error::ShapeMismatch("prediction and ground truth differ in size".into()));
        }
        let c = self.num_classes;
        for (&p, &g) in pred.ids.iter().zip(&gt.ids) {
            if (p as usize) >= c || (g as usize) >= c {
                return Err(Error::InvalidParameter(format!(
                    "label id out of range: pred {p}, gt {g}, classes {c}"
                )));
            }
            self.counts[g as usize * c + p as usize] += 1;
        }
        Ok(())
    }

    /// Per-class IoU `TP / (TP + FP + FN)`; zero-union classes are excluded
    /// from the mean and reported as `None`.
    pub fn iou(&self) -> Result<IouReport> {
        let c = self.num_classes;
        let mut per_class = Vec::with_capacity(c);
        let mut sum = 0.0;
        let mut present = 0usize;
        for k in 0..c {
            let tp = self.counts[k * c + k];
            let fp: u64 = (0..c).filter(|&g| g != k).map(|g| self.counts[g * c + k]).sum();
            let fn_: u64 = (0..c).filter(|&p| p != k).map(|p| self.counts[k * c + p]).sum();
            let union = tp + fp + fn_;
            if union == 0 {
                per_class.push(None);
            } else {
                let iou = tp as f64 / union as f64;
                per_class.push(Some(iou));
                sum += iou;
                present += 1;
            }
        }
        if present == 0 {
            return Err(Error::UndefinedMetric(
                "every class has zero union; mIoU undefined".into(),
            ));
        }
        Ok(IouReport { per_class, mean: sum / present as f64 })
    }
}

/// Single-shot mIoU of one prediction against one ground truth.
pub fn miou(pred: &LabelMap, gt: &LabelMap, num_classes: usize) -> Result<IouReport> {
    let mut cm = ConfusionMatrix::new(num_classes);
    cm.add(pred, gt)?;
    cm.iou()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn label(h: usize, w: usize, ids: Vec<u8>) -> LabelMap {
        LabelMap::new(h, w, ids).unwrap()
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let gt = label(2, 4, vec![0, 0, 1, 1, 2, 2, 0, 1]);
        let report = miou(&gt.clone(), &gt, 4).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.per_class[0], Some(1.0));
        assert_eq!(report.per_class[3], None, "class 3 absent everywhere");
    }

    #[test]
    fn disjoint_regions_score_zero_for_that_class() {
        // Class 1 predicted only where gt is 0 and vice versa.
        let gt = label(1, 4, vec![1, 1, 0, 0]);
        let pred = label(1, 4, vec![0, 0, 1, 1]);
        let report = miou(&pred, &gt, 2).unwrap();
        assert_eq!(report.per_class[1], Some(0.0));
        assert_eq!(report.mean, 0.0);
    }

    #[test]
    fn matches_direct_counting_oracle_on_random_maps() {
        let mut rng = RngStream::new(77);
        for _ in 0..20 {
            let gt_ids: Vec<u8> = (0..64).map(|_| rng.below(2) as u8).collect();
            let pr_ids: Vec<u8> = (0..64).map(|_| rng.below(2) as u8).collect();
            let gt = label(8, 8, gt_ids.clone());
            let pred = label(8, 8, pr_ids.clone());
            let report = miou(&pred, &gt, 2).unwrap();
            for k in 0..2u8 {
                let tp = gt_ids.iter().zip(&pr_ids).filter(|(g, p)| **g == k && **p == k).count();
                let fp = gt_ids.iter().zip(&pr_ids).filter(|(g, p)| **g != k && **p == k).count();
                let fn_ = gt_ids.iter().zip(&pr_ids).filter(|(g, p)| **g == k && **p != k).count();
                let want = if tp + fp + fn_ == 0 {
                    None
                } else {
                    Some(tp as f64 / (tp + fp + fn_) as f64)
                };
                assert_eq!(report.per_class[k as usize], want);
            }
        }
    }

    #[test]
    fn all_absent_classes_is_an_error() {
        let cm = ConfusionMatrix::new(3);
        assert!(matches!(cm.iou(), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn accumulation_equals_concatenation() {
        let mut rng = RngStream::new(5);
        let mut cm = ConfusionMatrix::new(3);
        let mut all_gt = Vec::new();
        let mut all_pred = Vec::new();
        for _ in 0..4 {
            let g: Vec<u8> = (0..36).map(|_| rng.below(3) as u8).collect();
            let p: Vec<u8> = (0..36).map(|_| rng.below(3) as u8).collect();
            cm.add(&label(6, 6, p.clone()), &label(6, 6, g.clone())).unwrap();
            all_gt.extend(g);
            all_pred.extend(p);
        }
        let combined = miou(&label(12, 12, all_pred), &label(12, 12, all_gt), 3).unwrap();
        let accumulated = cm.iou().unwrap();
        assert_eq!(combined.mean, accumulated.mean);
    }

    #[test]
    fn rejects_out_of_range_ids_and_shape_mismatch() {
        let mut cm = ConfusionMatrix::new(2);
        let bad = label(1, 2, vec![0, 2]);
        let ok = label(1, 2, vec![0, 1]);
        assert!(cm.add(&bad, &ok).is_err());
        let other = label(2, 1, vec![0, 1]);
        assert!(cm.add(&ok, &other).is_err());
    }
}
