#include "odyn/sparse.hpp"

#include <algorithm>
#include <numeric>

namespace odyn {

Csr Csr::from_triplets(int n, std::span<const Triplet> ts) {
  Csr m;
  m.n = n;
  m.rowptr.assign(n + 1, 0);
  for (const auto& t : ts) m.rowptr[t.row + 1]++;
  for (int i = 0; i < n; ++i) m.rowptr[i + 1] += m.rowptr[i];
  m.col.resize(ts.size());
  m.val.resize(ts.size());
  std::vector<std::int64_t> cursor(m.rowptr.begin(), m.rowptr.end() - 1);
  for (const auto& t : ts) {
    const std::int64_t k = cursor[t.row]++;
    m.col[k] = t.col;
    m.val[k] = t.value;
  }
  // canonical column order per row, duplicates summed
  for (int i = 0; i < n; ++i) {
    const std::int64_t b = m.rowptr[i], e = cursor[i];
    std::vector<std::pair<int, double>> row;
    row.reserve(e - b);
    for (std::int64_t k = b; k < e; ++k) row.emplace_back(m.col[k], m.val[k]);
    std::sort(row.begin(), row.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    std::int64_t w = b;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (w > b && m.col[w - 1] == row[k].first)
        m.val[w - 1] += row[k].second;
      else {
        m.col[w] = row[k].first;
        m.val[w] = row[k].second;
        ++w;
      }
    }
    cursor[i] = w;
  }
  // compact rows after duplicate folding
  Csr out;
  out.n = n;
  out.rowptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) out.rowptr[i + 1] = out.rowptr[i] + (cursor[i] - m.rowptr[i]);
  out.col.resize(out.rowptr[n]);
  out.val.resize(out.rowptr[n]);
  for (int i = 0; i < n; ++i) {
    std::copy(m.col.begin() + m.rowptr[i], m.col.begin() + cursor[i],
              out.col.begin() + out.rowptr[i]);
    std::copy(m.val.begin() + m.rowptr[i], m.val.begin() + cursor[i],
              out.val.begin() + out.rowptr[i]);
  }
  return out;
}

Csr Csr::transposed() const {
  Csr t;
  t.n = n;
  t.rowptr.assign(n + 1, 0);
  for (int c : col) t.rowptr[c + 1]++;
  for (int i = 0; i < n; ++i) t.rowptr[i + 1] += t.rowptr[i];
  t.col.resize(col.size());
  t.val.resize(val.size());
  std::vector<std::int64_t> cursor(t.rowptr.begin(), t.rowptr.end() - 1);
  for (int i = 0; i < n; ++i)
    for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) {
      const std::int64_t w = cursor[col[k]]++;
      t.col[w] = i;
      t.val[w] = val[k];
    }
  return t;
}

void matvec_serial(const Csr& m, std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < m.n; ++i) {
    double acc = 0.0;
    for (std::int64_t k = m.rowptr[i]; k < m.rowptr[i + 1]; ++k)
      acc += m.val[k] * x[m.col[k]];
    y[i] = acc;
  }
}

void matvec(const Csr& m, std::span<const double> x, std::span<double> y) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m.n; ++i) {
    double acc = 0.0;
    for (std::int64_t k = m.rowptr[i]; k < m.rowptr[i + 1]; ++k)
      acc += m.val[k] * x[m.col[k]];
    y[i] = acc;
  }
}

std::vector<int> strongly_connected_components(const Csr& m, std::vector<int>* nontrivial) {
  const int n = m.n;
  std::vector<int> comp(n, -1), low(n, 0), idx(n, -1), stack_mem;
  std::vector<char> on_stack(n, 0);
  stack_mem.reserve(n);
  int next_index = 0, comp_count = 0;

  struct Frame {
    int v;
    std::int64_t edge;
  };
  std::vector<Frame> frames;

  for (int root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    frames.push_back({root, m.rowptr[root]});
    idx[root] = low[root] = next_index++;
    stack_mem.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.v;
      if (f.edge < m.rowptr[v + 1]) {
        const int w = m.col[f.edge++];
        if (idx[w] == -1) {
          idx[w] = low[w] = next_index++;
          stack_mem.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, m.rowptr[w]});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        if (low[v] == idx[v]) {
          int w;
          do {
            w = stack_mem.back();
            stack_mem.pop_back();
            on_stack[w] = 0;
            comp[w] = comp_count;
          } while (w != v);
          ++comp_count;
        }
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }

  if (nontrivial) {
    std::vector<int> size(comp_count, 0);
    std::vector<char> has_loop(comp_count, 0);
    for (int i = 0; i < n; ++i) {
      size[comp[i]]++;
      for (std::int64_t k = m.rowptr[i]; k < m.rowptr[i + 1]; ++k)
        if (m.col[k] == i && m.val[k] != 0.0) has_loop[comp[i]] = 1;
      for (std::int64_t k = m.rowptr[i]; k < m.rowptr[i + 1]; ++k)
        if (comp[m.col[k]] == comp[i] && m.col[k] != i && m.val[k] != 0.0)
          has_loop[comp[i]] = 1;
    }
    nontrivial->clear();
    for (int c = 0; c < comp_count; ++c)
      if (size[c] > 1 || has_loop[c]) nontrivial->push_back(c);
  }
  return comp;
}

std::vector<char> reachable(const Csr& m, const std::vector<char>& sources) {
  std::vector<char> seen(sources.begin(), sources.end());
  std::vector<int> queue;
  for (int i = 0; i < m.n; ++i)
    if (seen[i]) queue.push_back(i);
  while (!queue.empty()) {
    const int v = queue.back();
    queue.pop_back();
    for (std::int64_t k = m.rowptr[v]; k < m.rowptr[v + 1]; ++k) {
      const int w = m.col[k];
      if (m.val[k] != 0.0 && !seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace odyn
