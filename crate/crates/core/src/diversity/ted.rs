//! Zhang–Shasha ordered tree edit distance with unit costs.

use super::ParseTree;

/// Post-order view: labels plus each node's leftmost-leaf descendant, both
/// 1-indexed with a dummy slot at 0.
struct Indexed<'a> {
    labels: Vec<&'a str>,
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Indexed<'a> {
    fn new(root: &'a ParseTree) -> Self {
        let mut labels = vec![""];
        let mut leftmost = vec![0];
        fn walk<'a>(t: &'a ParseTree, labels: &mut Vec<&'a str>, leftmost: &mut Vec<usize>) -> usize {
            let mut first_leaf = None;
            for c in &t.children {
                let l = walk(c, labels, leftmost);
                first_leaf.get_or_insert(l);
            }
            labels.push(&t.label);
            let me = labels.len() - 1;
            leftmost.push(first_leaf.unwrap_or(me));
            leftmost[me]
        }
        walk(root, &mut labels, &mut leftmost);

        let n = labels.len() - 1;
        // A keyroot is the highest node for its leftmost leaf.
        let mut seen = vec![false; n + 1];
        let mut keyroots = Vec::new();
        for i in (1..=n).rev() {
            if !seen[leftmost[i]] {
                seen[leftmost[i]] = true;
                keyroots.push(i);
            }
        }
        keyroots.reverse();
        Self {
            labels,
            leftmost,
            keyroots,
        }
    }

    fn len(&self) -> usize {
        self.labels.len() - 1
    }
}

/// Minimum number of node insertions, deletions and relabelings turning `a`
/// into `b`.
pub fn tree_edit_distance(a: &ParseTree, b: &ParseTree) -> usize {
    let (t1, t2) = (Indexed::new(a), Indexed::new(b));
    let (n1, n2) = (t1.len(), t2.len());
    let mut td = vec![vec![0usize; n2 + 1]; n1 + 1];
    let mut fd = vec![vec![0usize; n2 + 2]; n1 + 2];

    for &i in &t1.keyroots {
        for &j in &t2.keyroots {
            let (li, lj) = (t1.leftmost[i], t2.leftmost[j]);
            // fd is indexed by offset: row x ↔ node li + x − 1, column y ↔ lj + y − 1.
            fd[0][0] = 0;
            for x in 1..=i - li + 1 {
                fd[x][0] = fd[x - 1][0] + 1;
            }
            for y in 1..=j - lj + 1 {
                fd[0][y] = fd[0][y - 1] + 1;
            }
            for x in 1..=i - li + 1 {
                let u = li + x - 1;
                for y in 1..=j - lj + 1 {
                    let v = lj + y - 1;
                    let del = fd[x - 1][y] + 1;
                    let ins = fd[x][y - 1] + 1;
                    if t1.leftmost[u] == li && t2.leftmost[v] == lj {
                        let relabel = usize::from(t1.labels[u] != t2.labels[v]);
                        fd[x][y] = del.min(ins).min(fd[x - 1][y - 1] + relabel);
                        td[u][v] = fd[x][y];
                    } else {
                        let (px, py) = (t1.leftmost[u] - li, t2.leftmost[v] - lj);
                        fd[x][y] = del.min(ins).min(fd[px][py] + td[u][v]);
                    }
                }
            }
        }
    }
    td[n1][n2]
}
