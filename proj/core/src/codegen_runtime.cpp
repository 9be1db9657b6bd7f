#include "codegen_internal.hpp"

namespace graphdsl::codegen {

using namespace ast;
using sema::SymbolKind;

int countLines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

int countNonBlank(const std::string& text) {
    int n = 0;
    bool sawContent = false;
    for (char c : text) {
        if (c == '\n') {
            if (sawContent) ++n;
            sawContent = false;
        } else if (c != ' ' && c != '\t' && c != '\r') {
            sawContent = true;
        }
    }
    if (sawContent) ++n;
    return n;
}

// The loader mirrors the library's CSR construction exactly: '#' comments,
// `u v [w]` lines (weight defaults to 1), node count inferred as 1 + max id,
// undirected edges stored both ways, adjacency sorted, duplicates dropped
// keeping the minimum weight, reverse arrays as the exact transpose.
std::string preludeGraphRuntime() {
    return R"(typedef struct GraphCsr {
  int n;
  int m;
  int* offsets;
  int* dests;
  int* weights;
  int* rev_offsets;
  int* rev_srcs;
  int* rev_eid;
} GraphCsr;

typedef struct GraphDslRawEdge {
  int u;
  int v;
  int w;
} GraphDslRawEdge;

static int graphdsl_edge_cmp(const void* a, const void* b) {
  const GraphDslRawEdge* x = (const GraphDslRawEdge*)a;
  const GraphDslRawEdge* y = (const GraphDslRawEdge*)b;
  if (x->u != y->u) return x->u < y->u ? -1 : 1;
  if (x->v != y->v) return x->v < y->v ? -1 : 1;
  if (x->w != y->w) return x->w < y->w ? -1 : 1;
  return 0;
}

static GraphCsr graphdsl_load_graph(const char* path, int directed) {
  FILE* f = fopen(path, "r");
  if (!f) {
    fprintf(stderr, "cannot open graph file: %s\n", path);
    exit(1);
  }
  size_t cap = 1024, cnt = 0;
  GraphDslRawEdge* raw = (GraphDslRawEdge*)malloc(cap * sizeof(GraphDslRawEdge));
  char line[512];
  int max_id = -1;
  while (fgets(line, sizeof(line), f)) {
    int u, v, w;
    const char* p = line;
    while (*p == ' ' || *p == '\t') p++;
    if (*p == '#' || *p == '\n' || *p == '\0' || *p == '\r') continue;
    int got = sscanf(p, "%d %d %d", &u, &v, &w);
    if (got < 2) {
      fprintf(stderr, "malformed edge line: %s", line);
      exit(1);
    }
    if (got < 3) w = 1;
    if (cnt + 2 > cap) {
      cap *= 2;
      raw = (GraphDslRawEdge*)realloc(raw, cap * sizeof(GraphDslRawEdge));
    }
    GraphDslRawEdge e;
    e.u = u; e.v = v; e.w = w;
    raw[cnt++] = e;
    if (!directed && u != v) {
      GraphDslRawEdge r;
      r.u = v; r.v = u; r.w = w;
      raw[cnt++] = r;
    }
    if (u > max_id) max_id = u;
    if (v > max_id) max_id = v;
  }
  fclose(f);
  qsort(raw, cnt, sizeof(GraphDslRawEdge), graphdsl_edge_cmp);
  size_t uniq = 0;
  for (size_t i = 0; i < cnt; i++) {
    if (uniq > 0 && raw[uniq - 1].u == raw[i].u && raw[uniq - 1].v == raw[i].v) continue;
    raw[uniq++] = raw[i];
  }
  GraphCsr g;
  g.n = max_id + 1;
  g.m = (int)uniq;
  g.offsets = (int*)calloc(g.n + 1, sizeof(int));
  g.dests = (int*)malloc(uniq * sizeof(int));
  g.weights = (int*)malloc(uniq * sizeof(int));
  for (size_t i = 0; i < uniq; i++) g.offsets[raw[i].u + 1]++;
  for (int i = 0; i < g.n; i++) g.offsets[i + 1] += g.offsets[i];
  for (size_t i = 0; i < uniq; i++) {
    g.dests[i] = raw[i].v;
    g.weights[i] = raw[i].w;
  }
  g.rev_offsets = (int*)calloc(g.n + 1, sizeof(int));
  g.rev_srcs = (int*)malloc(uniq * sizeof(int));
  g.rev_eid = (int*)malloc(uniq * sizeof(int));
  for (size_t i = 0; i < uniq; i++) g.rev_offsets[raw[i].v + 1]++;
  for (int i = 0; i < g.n; i++) g.rev_offsets[i + 1] += g.rev_offsets[i];
  int* cursor = (int*)malloc(g.n * sizeof(int));
  for (int i = 0; i < g.n; i++) cursor[i] = g.rev_offsets[i];
  for (int u = 0; u < g.n; u++) {
    for (int e = g.offsets[u]; e < g.offsets[u + 1]; e++) {
      int slot = cursor[g.dests[e]]++;
      g.rev_srcs[slot] = u;
      g.rev_eid[slot] = e;
    }
  }
  free(cursor);
  free(raw);
  return g;
}

static void graphdsl_free_graph(GraphCsr* g) {
  free(g->offsets);
  free(g->dests);
  free(g->weights);
  free(g->rev_offsets);
  free(g->rev_srcs);
  free(g->rev_eid);
}
)";
}

std::string preludeIsEdge(const std::string& qualifier) {
    return qualifier + R"( int graphdsl_is_edge(const int* offsets, const int* dests, int u, int v) {
  int lo = offsets[u];
  int hi = offsets[u + 1] - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (dests[mid] == v) return 1;
    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;
  }
  return 0;
}
)";
}

std::string preludeEdgeIndex(const std::string& qualifier) {
    return qualifier + R"( int graphdsl_edge_index(const int* offsets, const int* dests, int u, int v) {
  int lo = offsets[u];
  int hi = offsets[u + 1] - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (dests[mid] == v) return mid;
    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;
  }
  return -1;
}
)";
}

std::string buildMainDriver(const sema::AnnotatedProgram& program, const LoweringPlan& plan,
                            const std::string& callPrefix, bool boolAsInt) {
    const FunctionDecl& fn = program.entry();
    std::ostringstream os;
    os << "int main(int argc, char** argv) {\n";
    os << "  if (argc < 3) {\n";
    os << "    fprintf(stderr, \"usage: %s <graph> <directed 0|1>";
    for (const auto& p : fn.params) {
        const auto& s = program.symbols.at(p.symbol);
        if (s.kind == SymbolKind::Graph || s.kind == SymbolKind::NodeProperty ||
            s.kind == SymbolKind::EdgeProperty)
            continue;
        os << " <" << p.name << ">";
    }
    os << "\\n\", argv[0]);\n";
    os << "    return 2;\n";
    os << "  }\n";
    os << "  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));\n";
    os << "  int V = g.n;\n";
    os << "  (void)V;\n";

    int argIndex = 3;
    std::vector<std::string> callArgs;
    std::string setCountVar;
    for (const auto& p : fn.params) {
        const auto& s = program.symbols.at(p.symbol);
        const std::string& nm = plan.names.at(p.symbol);
        switch (s.kind) {
            case SymbolKind::Graph:
                callArgs.push_back("g");
                break;
            case SymbolKind::NodeProperty: {
                std::string ct = cType(s.type.element, boolAsInt);
                os << "  " << ct << "* " << nm << " = (" << ct << "*)calloc(V, sizeof(" << ct
                   << "));\n";
                callArgs.push_back(nm);
                break;
            }
            case SymbolKind::EdgeProperty:
                callArgs.push_back("g.weights");
                break;
            case SymbolKind::NodeSet: {
                os << "  int " << nm << "_count = 0;\n";
                os << "  int* " << nm << " = (int*)malloc((strlen(argv[" << argIndex
                   << "]) + 1) * sizeof(int));\n";
                os << "  {\n";
                os << "    char* list = argv[" << argIndex << "];\n";
                os << "    char* tok = strtok(list, \",\");\n";
                os << "    while (tok) {\n";
                os << "      " << nm << "[" << nm << "_count++] = atoi(tok);\n";
                os << "      tok = strtok(NULL, \",\");\n";
                os << "    }\n";
                os << "  }\n";
                callArgs.push_back(nm);
                callArgs.push_back(nm + "_count");
                setCountVar = nm;
                ++argIndex;
                break;
            }
            default: {
                std::string ct = cType(s.type.kind, boolAsInt);
                std::string parse;
                if (s.type.kind == TypeKind::Float || s.type.kind == TypeKind::Double)
                    parse = "atof(argv[" + std::to_string(argIndex) + "])";
                else
                    parse = "atoll(argv[" + std::to_string(argIndex) + "])";
                os << "  " << ct << " " << nm << " = (" << ct << ")" << parse << ";\n";
                callArgs.push_back(nm);
                ++argIndex;
                break;
            }
        }
    }
    (void)setCountVar;

    bool hasReturn = false;
    TypeKind retKind = TypeKind::Void;
    for (const auto& st : fn.body.stmts) {
        if (st->is<ReturnStmt>() && st->as<ReturnStmt>().value) {
            hasReturn = true;
            retKind = st->as<ReturnStmt>().value->type.kind;
        }
    }

    std::string call = plan.functionName + "(";
    if (!callPrefix.empty()) call = plan.functionName + "(" + callPrefix + ", ";
    for (size_t i = 0; i < callArgs.size(); ++i) {
        if (i) call += ", ";
        call += callArgs[i];
    }
    call += ")";

    if (hasReturn) {
        std::string ct = cType(retKind, boolAsInt);
        os << "  " << ct << " result = " << call << ";\n";
        if (retKind == TypeKind::Float || retKind == TypeKind::Double)
            os << "  printf(\"return\\t%.17g\\n\", (double)result);\n";
        else
            os << "  printf(\"return\\t%lld\\n\", (long long)result);\n";
    } else {
        os << "  " << call << ";\n";
    }

    for (const auto& p : fn.params) {
        const auto& s = program.symbols.at(p.symbol);
        if (s.kind != SymbolKind::NodeProperty) continue;
        const std::string& nm = plan.names.at(p.symbol);
        os << "  for (int i = 0; i < V; i++) {\n";
        if (isFloatElem(s.type.element))
            os << "    printf(\"" << p.name << "\\t%d\\t%.17g\\n\", i, (double)" << nm << "[i]);\n";
        else if (s.type.element == TypeKind::Bool)
            os << "    printf(\"" << p.name << "\\t%d\\t%s\\n\", i, " << nm
               << "[i] ? \"true\" : \"false\");\n";
        else
            os << "    printf(\"" << p.name << "\\t%d\\t%lld\\n\", i, (long long)" << nm
               << "[i]);\n";
        os << "  }\n";
    }
    os << "  graphdsl_free_graph(&g);\n";
    os << "  return 0;\n";
    os << "}\n";
    return os.str();
}

}  // namespace graphdsl::codegen
