use crate::image::Rect;

/// Default relative tolerance for [`group_rects`].
pub const DEFAULT_GROUP_EPS: f64 = 0.2;

fn similar(a: &Rect, b: &Rect, eps: f64) -> bool {
    let mean_side = (a.w + a.h + b.w + b.h) as f64 / 4.0;
    let tol = eps * mean_side;
    let diff = |p: u32, q: u32| (p as f64 - q as f64).abs() <= tol;
    diff(a.w, b.w) && diff(a.h, b.h) && diff(a.x, b.x) && diff(a.y, b.y)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Largest area first, ties by `(y, x)`.
pub fn sort_by_area(rects: &mut [Rect]) {
    rects.sort_by(|a, b| b.area().cmp(&a.area()).then((a.y, a.x, a.w).cmp(&(b.y, b.x, b.w))));
}

/// Clusters raw detections into similarity classes (transitive closure of
/// the pairwise test) and emits the rounded mean rect of every class with
/// more than `min_neighbors` members.
///
/// With `min_neighbors == 0` no clustering happens: every distinct hit is
/// returned.
pub fn group_rects(hits: &[Rect], min_neighbors: usize, eps: f64) -> Vec<Rect> {
    let mut out: Vec<Rect>;
    if min_neighbors == 0 {
        out = hits.to_vec();
        out.sort_by_key(|r| (r.y, r.x, r.w, r.h));
        out.dedup();
    } else {
        let n = hits.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for j in i + 1..n {
                if similar(&hits[i], &hits[j], eps) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut classes: std::collections::BTreeMap<usize, Vec<&Rect>> = Default::default();
        for (i, hit) in hits.iter().enumerate() {
            let root = find(&mut parent, i);
            classes.entry(root).or_default().push(hit);
        }
        out = classes
            .values()
            .filter(|members| members.len() > min_neighbors)
            .map(|members| {
                let k = members.len() as f64;
                let mean = |f: fn(&Rect) -> u32| (members.iter().map(|r| f(r) as f64).sum::<f64>() / k).round() as u32;
                Rect::new(mean(|r| r.x), mean(|r| r.y), mean(|r| r.w), mean(|r| r.h))
            })
            .collect();
    }
    sort_by_area(&mut out);
    out
}
