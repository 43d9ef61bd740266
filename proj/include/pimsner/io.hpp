#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pimsner/algebra.hpp"
#include "pimsner/bimodule.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/integer_matrix.hpp"
#include "pimsner/kktheory.hpp"

namespace pimsner {

using Json = nlohmann::ordered_json;

/// Parses text as JSON; syntax errors become ParseError("line N", ...).
Json parse_json(std::string_view text);
std::string read_text_file(const std::string& path);

/// [re, im] with each part an integer or a "p/q" string; a bare scalar means im = 0.
ExactComplex complex_from_json(const Json& j, const std::string& where);
Json complex_to_json(const ExactComplex& c);

/// {"unit": [re,im], "terms": [{"mu": [...], "nu": [...], "coeff": [re,im]}]}.
/// mu and nu list edge ids; when both are empty the term needs "vertex".
AlgebraElement algebra_element_from_json(const DirectedGraph& g, const Json& j, const std::string& where = "element");
Json algebra_element_to_json(const DirectedGraph& g, const AlgebraElement& x);

/// {"name": ..., "size": k, "entries": [k*k elements, row-major]}; a bare
/// element is read as a 1x1 class.
PartialIsometryClass isometry_from_json(const DirectedGraph& g, const Json& j, const std::string& where = "isometry");
/// {"isometries": [...]} or a plain array of isometries.
std::vector<PartialIsometryClass> isometry_suite_from_json(const DirectedGraph& g, const Json& j);
Json matrix_over_algebra_to_json(const DirectedGraph& g, const MatrixOverAlgebra& m);

/// {"rows": r, "cols": c, "entries": [...]} row-major, or a list of rows.
IntegerMatrix integer_matrix_from_json(const Json& j);
Json integer_matrix_to_json(const IntegerMatrix& m);
Json integer_vector_to_json(const IntegerVector& v);

Json kgroup_to_json(const KGroup& k);
Json exact_sequence_to_json(const DirectedGraph& g, const ExactSequenceReport& r);
Json smith_to_json(const IntegerMatrix& m, const SmithDecomposition& d);
Json assumptions_to_json(const DirectedGraph& g, const AssumptionReport& r);
Json index_to_json(const DirectedGraph& g, const IndexComputation& c);
Json diagram_to_json(const DirectedGraph& g, const std::vector<DiagramReport>& reports);
Json smeb_to_json(const SmebReport& r);
Json tensor_to_json(const DirectedGraph& g, const TensorElement& t);
Json endo_matrix_to_json(const DirectedGraph& g, const EndoMatrix& m);

/// Vertex-indexed integer class as {"vertex id": "n", ...}.
Json k_class_to_json(const DirectedGraph& g, const KClass& x);

}  // namespace pimsner
