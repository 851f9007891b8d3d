#include "bike/perception/regression.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "bike/error.h"
#include "bike/random.h"

namespace bike::perception {

using nlohmann::json;

std::string_view to_string(model_kind const k) {
  return k == model_kind::ridge ? "ridge" : "gbt";
}

model_kind parse_model_kind(std::string_view const s) {
  if (s == "ridge") {
    return model_kind::ridge;
  }
  if (s == "gbt") {
    return model_kind::gbt;
  }
  fail(error_kind::configuration_error,
       fmt::format("unknown regressor kind '{}'", s));
}

json to_json(gbt_params const& p) {
  return {{"num_leaves", p.num_leaves_},
          {"max_depth", p.max_depth_},
          {"min_child_samples", p.min_child_samples_},
          {"subsample", p.subsample_},
          {"colsample", p.colsample_},
          {"learning_rate", p.learning_rate_},
          {"n_estimators", p.n_estimators_}};
}

gbt_params gbt_params_from_json(json const& j) {
  auto p = gbt_params{};
  p.num_leaves_ = j.value("num_leaves", p.num_leaves_);
  p.max_depth_ = j.value("max_depth", p.max_depth_);
  p.min_child_samples_ = j.value("min_child_samples", p.min_child_samples_);
  p.subsample_ = j.value("subsample", p.subsample_);
  p.colsample_ = j.value("colsample", p.colsample_);
  p.learning_rate_ = j.value("learning_rate", p.learning_rate_);
  p.n_estimators_ = j.value("n_estimators", p.n_estimators_);
  if (p.num_leaves_ < 2 || p.min_child_samples_ < 1 || p.n_estimators_ < 1 ||
      !(p.subsample_ > 0.0 && p.subsample_ <= 1.0) ||
      !(p.colsample_ > 0.0 && p.colsample_ <= 1.0) ||
      !(p.learning_rate_ > 0.0)) {
    fail(error_kind::configuration_error,
         fmt::format("invalid boosted-tree parameters {}", j.dump()));
  }
  return p;
}

double regression_tree::predict(std::span<double const> x) const {
  auto i = 0;
  while (nodes_[static_cast<std::size_t>(i)].feature_ >= 0) {
    auto const& n = nodes_[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature_)] <= n.threshold_ ? n.left_
                                                                : n.right_;
  }
  return nodes_[static_cast<std::size_t>(i)].value_;
}

double regression_model::predict(std::span<double const> x) const {
  if (kind_ == model_kind::ridge) {
    if (x.size() != coef_.size()) {
      fail(error_kind::invalid_argument,
           fmt::format("model expects {} features, got {}", coef_.size(),
                       x.size()));
    }
    auto s = intercept_;
    for (auto i = std::size_t{0}; i != coef_.size(); ++i) {
      s += coef_[i] * x[i];
    }
    return s;
  }
  auto s = base_;
  for (auto const& t : trees_) {
    s += t.predict(x);
  }
  return s;
}

// ---- serialization ---------------------------------------------------------

json to_json(regression_model const& m) {
  auto j = json{{"format", "bikeability-regression-model"},
                {"version", 1},
                {"kind", to_string(m.kind_)},
                {"features", m.features_},
                {"metadata",
                 {{"seed", m.seed_},
                  {"split", m.split_},
                  {"n_train", m.n_train_},
                  {"n_validation", m.n_validation_}}}};
  if (m.kind_ == model_kind::ridge) {
    j["intercept"] = m.intercept_;
    j["coefficients"] = m.coef_;
    j["lambda"] = m.lambda_;
  } else {
    j["base"] = m.base_;
    j["params"] = to_json(m.params_);
    auto trees = json::array();
    for (auto const& t : m.trees_) {
      auto nodes = json::array();
      for (auto const& n : t.nodes_) {
        nodes.push_back(json::array(
            {n.feature_, n.threshold_, n.left_, n.right_, n.value_}));
      }
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  }
  return j;
}

regression_model model_from_json(json const& j) {
  try {
    if (j.at("version").get<int>() != 1) {
      fail(error_kind::parse_error, "unsupported model version");
    }
    auto m = regression_model{};
    m.kind_ = parse_model_kind(j.at("kind").get<std::string>());
    m.features_ = j.at("features").get<std::vector<std::string>>();
    auto const& meta = j.at("metadata");
    m.seed_ = meta.at("seed").get<std::uint64_t>();
    m.split_ = meta.at("split").get<double>();
    m.n_train_ = meta.at("n_train").get<std::size_t>();
    m.n_validation_ = meta.at("n_validation").get<std::size_t>();
    if (m.kind_ == model_kind::ridge) {
      m.intercept_ = j.at("intercept").get<double>();
      m.coef_ = j.at("coefficients").get<std::vector<double>>();
      m.lambda_ = j.at("lambda").get<double>();
    } else {
      m.base_ = j.at("base").get<double>();
      m.params_ = gbt_params_from_json(j.at("params"));
      for (auto const& t : j.at("trees")) {
        auto tree = regression_tree{};
        for (auto const& n : t) {
          tree.nodes_.push_back({n.at(0).get<int>(), n.at(1).get<double>(),
                                 n.at(2).get<int>(), n.at(3).get<int>(),
                                 n.at(4).get<double>()});
        }
        m.trees_.push_back(std::move(tree));
      }
    }
    return m;
  } catch (json::exception const& e) {
    fail(error_kind::parse_error, fmt::format("malformed model: {}", e.what()));
  }
}

// ---- metrics and split -----------------------------------------------------

metrics regression_metrics(std::span<double const> y,
                           std::span<double const> y_hat, warnings* w) {
  if (y.empty() || y.size() != y_hat.size()) {
    fail(error_kind::invalid_argument,
         fmt::format("metrics need equal non-zero lengths, got {} and {}",
                     y.size(), y_hat.size()));
  }
  auto const n = static_cast<double>(y.size());
  auto const mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  auto abs_sum = 0.0;
  auto rel_sum = 0.0;
  auto sse = 0.0;
  auto sst = 0.0;
  auto zero = false;
  for (auto i = std::size_t{0}; i != y.size(); ++i) {
    auto const e = y_hat[i] - y[i];
    abs_sum += std::abs(e);
    sse += e * e;
    sst += (y[i] - mean) * (y[i] - mean);
    if (y[i] == 0.0) {
      zero = true;
    } else {
      rel_sum += std::abs(e / y[i]);
    }
  }
  auto m = metrics{};
  m.mae_ = abs_sum / n;
  m.rmse_ = std::sqrt(sse / n);
  m.r2_ = sst == 0.0 ? 0.0 : 1.0 - sse / sst;
  if (zero) {
    warn(w, "MAPE not reported: observed values contain 0");
  } else {
    m.mape_ = rel_sum / n;
  }
  return m;
}

split train_validation_split(std::size_t const n, double const fraction,
                             std::uint64_t const seed) {
  if (n < 2) {
    fail(error_kind::invalid_argument, "split needs at least two rows");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail(error_kind::invalid_argument,
         fmt::format("split fraction {} must lie in (0,1)", fraction));
  }
  auto idx = std::vector<std::size_t>(n);
  std::iota(begin(idx), end(idx), std::size_t{0});
  auto rng = rng_t{seed};
  partial_shuffle(std::span{idx}, n, rng);

  auto const n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction)),
      1, n - 1);
  auto s = split{};
  s.train_.assign(begin(idx), begin(idx) + static_cast<std::ptrdiff_t>(n_train));
  s.validation_.assign(begin(idx) + static_cast<std::ptrdiff_t>(n_train),
                       end(idx));
  std::sort(begin(s.train_), end(s.train_));
  std::sort(begin(s.validation_), end(s.validation_));
  return s;
}

// ---- ridge -----------------------------------------------------------------

regression_model fit_ridge(matrix_view const x, std::span<double const> y,
                           double const lambda) {
  if (x.rows_ == 0 || y.size() != x.rows_) {
    fail(error_kind::invalid_argument,
         fmt::format("ridge needs aligned non-empty data ({} rows, {} targets)",
                     x.rows_, y.size()));
  }
  if (!(lambda >= 0.0)) {
    fail(error_kind::invalid_argument, "ridge lambda must be >= 0");
  }
  auto const n = static_cast<Eigen::Index>(x.rows_);
  auto const p = static_cast<Eigen::Index>(x.cols_);
  auto xm = Eigen::MatrixXd(n, p);
  auto ym = Eigen::VectorXd(n);
  for (auto r = Eigen::Index{0}; r != n; ++r) {
    for (auto c = Eigen::Index{0}; c != p; ++c) {
      xm(r, c) = x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    ym(r) = y[static_cast<std::size_t>(r)];
  }
  Eigen::RowVectorXd const x_mean = xm.colwise().mean();
  auto const y_mean = ym.mean();
  xm.rowwise() -= x_mean;
  ym.array() -= y_mean;

  auto beta = Eigen::VectorXd{};
  if (lambda == 0.0) {
    auto const qr = xm.colPivHouseholderQr();
    if (qr.rank() < p) {
      fail(error_kind::numerical_error,
           fmt::format("design matrix is rank deficient (rank {} of {}); use "
                       "lambda > 0",
                       qr.rank(), p));
    }
    beta = qr.solve(ym);
  } else {
    Eigen::MatrixXd a = xm.transpose() * xm;
    a.diagonal().array() += lambda;
    beta = a.ldlt().solve(xm.transpose() * ym);
  }
  if (!beta.allFinite()) {
    fail(error_kind::numerical_error, "ridge solution is not finite");
  }

  auto m = regression_model{};
  m.kind_ = model_kind::ridge;
  m.lambda_ = lambda;
  m.coef_.assign(beta.data(), beta.data() + p);
  m.intercept_ = y_mean - x_mean.dot(beta);
  return m;
}

// ---- boosted trees ---------------------------------------------------------

namespace {

struct candidate {
  double gain_{0.0};
  int feature_{-1};
  double threshold_{0.0};
};

struct grow_leaf {
  int node_{0};
  int depth_{0};
  std::vector<std::size_t> rows_;
  candidate best_;
};

candidate best_split(matrix_view const x, std::span<double const> r,
                     std::vector<std::size_t> const& rows,
                     std::vector<std::size_t> const& features,
                     int const min_child) {
  auto best = candidate{};
  auto const n = rows.size();
  if (n < 2 * static_cast<std::size_t>(min_child)) {
    return best;
  }
  auto total = 0.0;
  for (auto const i : rows) {
    total += r[i];
  }
  auto sorted = rows;
  for (auto const f : features) {
    std::sort(begin(sorted), end(sorted),
              [&](std::size_t const a, std::size_t const b) {
                auto const va = x.at(a, f);
                auto const vb = x.at(b, f);
                return va < vb || (va == vb && a < b);
              });
    auto left = 0.0;
    for (auto k = std::size_t{0}; k + 1 < n; ++k) {
      left += r[sorted[k]];
      auto const nl = k + 1;
      auto const nr = n - nl;
      auto const v = x.at(sorted[k], f);
      auto const next = x.at(sorted[k + 1], f);
      if (v == next || nl < static_cast<std::size_t>(min_child) ||
          nr < static_cast<std::size_t>(min_child)) {
        continue;
      }
      auto const right = total - left;
      auto const gain = left * left / static_cast<double>(nl) +
                        right * right / static_cast<double>(nr) -
                        total * total / static_cast<double>(n);
      if (gain > best.gain_ + 1e-12) {
        best = {gain, static_cast<int>(f), v + (next - v) / 2.0};
      }
    }
  }
  return best;
}

regression_tree grow_tree(matrix_view const x, std::span<double const> r,
                          std::vector<std::size_t> rows,
                          std::vector<std::size_t> const& features,
                          gbt_params const& p) {
  auto tree = regression_tree{};
  tree.nodes_.push_back({});
  auto leaves = std::vector<grow_leaf>{};
  leaves.push_back({0, 0, std::move(rows), {}});
  leaves.back().best_ =
      best_split(x, r, leaves.back().rows_, features, p.min_child_samples_);

  auto n_leaves = 1;
  while (n_leaves < p.num_leaves_) {
    auto pick = -1;
    for (auto i = 0; i != static_cast<int>(leaves.size()); ++i) {
      auto const& l = leaves[static_cast<std::size_t>(i)];
      if (l.best_.feature_ < 0 ||
          (p.max_depth_ > 0 && l.depth_ >= p.max_depth_)) {
        continue;
      }
      if (pick < 0 ||
          l.best_.gain_ > leaves[static_cast<std::size_t>(pick)].best_.gain_) {
        pick = i;
      }
    }
    if (pick < 0) {
      break;
    }
    auto leaf = std::move(leaves[static_cast<std::size_t>(pick)]);
    leaves.erase(begin(leaves) + pick);

    auto left_rows = std::vector<std::size_t>{};
    auto right_rows = std::vector<std::size_t>{};
    for (auto const i : leaf.rows_) {
      (x.at(i, static_cast<std::size_t>(leaf.best_.feature_)) <=
               leaf.best_.threshold_
           ? left_rows
           : right_rows)
          .push_back(i);
    }
    auto const li = static_cast<int>(tree.nodes_.size());
    tree.nodes_.push_back({});
    tree.nodes_.push_back({});
    auto& parent = tree.nodes_[static_cast<std::size_t>(leaf.node_)];
    parent.feature_ = leaf.best_.feature_;
    parent.threshold_ = leaf.best_.threshold_;
    parent.left_ = li;
    parent.right_ = li + 1;

    for (auto const& [node, part] :
         {std::pair{li, &left_rows}, std::pair{li + 1, &right_rows}}) {
      auto child = grow_leaf{node, leaf.depth_ + 1, std::move(*part), {}};
      child.best_ = best_split(x, r, child.rows_, features,
                               p.min_child_samples_);
      leaves.push_back(std::move(child));
    }
    ++n_leaves;
  }

  for (auto const& l : leaves) {
    auto s = 0.0;
    for (auto const i : l.rows_) {
      s += r[i];
    }
    tree.nodes_[static_cast<std::size_t>(l.node_)].value_ =
        l.rows_.empty() ? 0.0
                        : p.learning_rate_ * s /
                              static_cast<double>(l.rows_.size());
  }
  return tree;
}

std::size_t fraction_count(std::size_t const n, double const f) {
  return std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(static_cast<double>(n) * f)), 1, n);
}

}  // namespace

regression_model fit_gbt(matrix_view const x, std::span<double const> y,
                         gbt_params const& p, std::uint64_t const seed) {
  if (x.rows_ == 0 || y.size() != x.rows_ || x.cols_ == 0) {
    fail(error_kind::invalid_argument,
         "boosted trees need aligned non-empty data");
  }
  auto m = regression_model{};
  m.kind_ = model_kind::gbt;
  m.params_ = p;
  m.base_ = std::accumulate(y.begin(), y.end(), 0.0) /
            static_cast<double>(y.size());

  auto rng = rng_t{seed};
  auto pred = std::vector<double>(x.rows_, m.base_);
  auto resid = std::vector<double>(x.rows_);
  auto all_rows = std::vector<std::size_t>(x.rows_);
  std::iota(begin(all_rows), end(all_rows), std::size_t{0});
  auto all_features = std::vector<std::size_t>(x.cols_);
  std::iota(begin(all_features), end(all_features), std::size_t{0});

  for (auto it = 0; it != p.n_estimators_; ++it) {
    for (auto i = std::size_t{0}; i != x.rows_; ++i) {
      resid[i] = y[i] - pred[i];
    }
    auto rows = all_rows;
    auto const nr = fraction_count(rows.size(), p.subsample_);
    partial_shuffle(std::span{rows}, nr, rng);
    rows.resize(nr);
    std::sort(begin(rows), end(rows));

    auto features = all_features;
    auto const nf = fraction_count(features.size(), p.colsample_);
    partial_shuffle(std::span{features}, nf, rng);
    features.resize(nf);
    std::sort(begin(features), end(features));

    auto tree = grow_tree(x, resid, std::move(rows), features, p);
    for (auto i = std::size_t{0}; i != x.rows_; ++i) {
      pred[i] += tree.predict(x.row(i));
    }
    m.trees_.push_back(std::move(tree));
  }
  return m;
}

namespace {

struct owned_matrix {
  matrix_view view() const { return {values_, rows_, cols_}; }

  std::vector<double> values_;
  std::size_t rows_{0};
  std::size_t cols_{0};
};

owned_matrix take_rows(matrix_view const x,
                       std::span<std::size_t const> rows) {
  auto m = owned_matrix{{}, rows.size(), x.cols_};
  m.values_.reserve(rows.size() * x.cols_);
  for (auto const r : rows) {
    auto const row = x.row(r);
    m.values_.insert(end(m.values_), row.begin(), row.end());
  }
  return m;
}

std::vector<double> take(std::span<double const> y,
                         std::span<std::size_t const> rows) {
  auto out = std::vector<double>{};
  out.reserve(rows.size());
  for (auto const r : rows) {
    out.push_back(y[r]);
  }
  return out;
}

}  // namespace

gbt_params cross_validate_gbt(matrix_view const x, std::span<double const> y,
                              std::span<gbt_params const> grid,
                              std::size_t const folds,
                              std::uint64_t const seed) {
  if (grid.empty()) {
    fail(error_kind::configuration_error, "empty hyperparameter grid");
  }
  if (folds < 2 || folds > x.rows_) {
    fail(error_kind::invalid_argument,
         fmt::format("{} folds for {} rows", folds, x.rows_));
  }
  auto idx = std::vector<std::size_t>(x.rows_);
  std::iota(begin(idx), end(idx), std::size_t{0});
  auto rng = rng_t{seed};
  partial_shuffle(std::span{idx}, idx.size(), rng);

  auto best = std::size_t{0};
  auto best_rmse = std::numeric_limits<double>::infinity();
  for (auto g = std::size_t{0}; g != grid.size(); ++g) {
    auto total = 0.0;
    for (auto f = std::size_t{0}; f != folds; ++f) {
      auto train = std::vector<std::size_t>{};
      auto test = std::vector<std::size_t>{};
      for (auto i = std::size_t{0}; i != idx.size(); ++i) {
        (i % folds == f ? test : train).push_back(idx[i]);
      }
      auto const xt = take_rows(x, train);
      auto const yt = take(y, train);
      auto const model = fit_gbt(xt.view(), yt, grid[g], seed + f);
      auto sse = 0.0;
      for (auto const i : test) {
        auto const e = model.predict(x.row(i)) - y[i];
        sse += e * e;
      }
      total += std::sqrt(sse / static_cast<double>(test.size()));
    }
    auto const rmse = total / static_cast<double>(folds);
    if (rmse < best_rmse) {
      best_rmse = rmse;
      best = g;
    }
  }
  return grid[best];
}

training_result train_regressor(matrix_view const x, std::span<double const> y,
                                regressor_options const& opt, warnings* w) {
  if (x.rows_ < 10) {
    fail(error_kind::invalid_argument,
         fmt::format("training needs at least 10 rows, got {}", x.rows_));
  }
  if (y.size() != x.rows_) {
    fail(error_kind::invalid_argument,
         fmt::format("{} targets for {} rows", y.size(), x.rows_));
  }
  auto res = training_result{};
  res.split_ = train_validation_split(x.rows_, opt.split_, opt.seed_);
  auto const xt = take_rows(x, res.split_.train_);
  auto const yt = take(y, res.split_.train_);

  if (opt.kind_ == model_kind::ridge) {
    res.model_ = fit_ridge(xt.view(), yt, opt.lambda_);
  } else {
    auto params = opt.gbt_;
    if (!opt.grid_.empty()) {
      params = cross_validate_gbt(xt.view(), yt, opt.grid_,
                                  std::min(opt.folds_, xt.rows_), opt.seed_);
    }
    res.model_ = fit_gbt(xt.view(), yt, params, opt.seed_);
  }
  res.model_.seed_ = opt.seed_;
  res.model_.split_ = opt.split_;
  res.model_.n_train_ = res.split_.train_.size();
  res.model_.n_validation_ = res.split_.validation_.size();

  auto yv = std::vector<double>{};
  auto pv = std::vector<double>{};
  for (auto const i : res.split_.validation_) {
    yv.push_back(y[i]);
    pv.push_back(res.model_.predict(x.row(i)));
  }
  res.metrics_ = regression_metrics(yv, pv, w);
  return res;
}

std::map<std::string, double> predict_scores(regression_model const& model,
                                             feature_matrix const& x) {
  auto out = std::map<std::string, double>{};
  for (auto r = std::size_t{0}; r != x.rows(); ++r) {
    out.emplace(x.ids_[r], model.predict(x.row(r)));
  }
  return out;
}

}  // namespace bike::perception
