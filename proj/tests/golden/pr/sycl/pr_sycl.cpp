// Generated pr (SYCL backend)
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <climits>
#include <sycl/sycl.hpp>

typedef struct GraphCsr {
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

template <typename T>
using graphdsl_atomic = sycl::atomic_ref<T, sycl::memory_order::relaxed,
                                         sycl::memory_scope::device,
                                         sycl::access::address_space::global_space>;

void computepr(sycl::queue& q, const GraphCsr& g, double damping, double threshold, int maxIter, double* rank) {
  int V = g.n;
  int E = g.m;
  (void)E;
  const int NUM_THREADS = 1024;

  // device graph (static)
  int* gpu_offsets = sycl::malloc_device<int>((V + 1), q);
  q.memcpy(gpu_offsets, g.offsets, sizeof(int) * (V + 1)).wait();
  int* gpu_rev_offsets = sycl::malloc_device<int>((V + 1), q);
  q.memcpy(gpu_rev_offsets, g.rev_offsets, sizeof(int) * (V + 1)).wait();
  int* gpu_rev_srcs = sycl::malloc_device<int>(E, q);
  q.memcpy(gpu_rev_srcs, g.rev_srcs, sizeof(int) * E).wait();
  int* gpu_rev_eid = sycl::malloc_device<int>(E, q);
  q.memcpy(gpu_rev_eid, g.rev_eid, sizeof(int) * E).wait();
  // host state
  double* rankNext = (double*)calloc(V, sizeof(double));
  double numNodes = 0;
  int iter = 0;
  bool converged = false;
  double dangling = 0;
  // device state
  double* gpu_rank = sycl::malloc_device<double>(V, q);
  double* gpu_rankNext = sycl::malloc_device<double>(V, q);
  bool* gpu_converged = sycl::malloc_device<bool>(1, q);
  double* gpu_dangling = sycl::malloc_device<double>(1, q);

  numNodes = V;
  for (int i = 0; i < V; i++) {
    rank[i] = 1.0 / numNodes;
  }
  for (int i = 0; i < V; i++) {
    rankNext[i] = 0.0;
  }
  iter = 0;
  converged = false;
  q.memcpy(gpu_rank, rank, sizeof(double) * V).wait();
  q.memcpy(gpu_rankNext, rankNext, sizeof(double) * V).wait();
  while (!converged) {
    converged = true;
    q.memcpy(gpu_converged, &converged, sizeof(bool)).wait();
    dangling = 0.0;
    q.memcpy(gpu_dangling, &dangling, sizeof(double)).wait();
    q.submit([&](sycl::handler& h) {
      h.parallel_for<class computepr_kernel_0>(sycl::range<1>(NUM_THREADS), [=](sycl::id<1> graphdsl_tid) {
        for (int u_11 = graphdsl_tid[0]; u_11 < V; u_11 += NUM_THREADS) {
          if ((gpu_offsets[u_11 + 1] - gpu_offsets[u_11]) == 0) {
            graphdsl_atomic<double>(*gpu_dangling).fetch_add((double)(gpu_rank[u_11]));
          }
        }
      });
    }).wait();
    q.memcpy(&dangling, gpu_dangling, sizeof(double)).wait();
    q.submit([&](sycl::handler& h) {
      h.parallel_for<class computepr_kernel_1>(sycl::range<1>(NUM_THREADS), [=](sycl::id<1> graphdsl_tid) {
        for (int v_12 = graphdsl_tid[0]; v_12 < V; v_12 += NUM_THREADS) {
          double total = dangling / numNodes;
          for (int edge = gpu_rev_offsets[v_12]; edge < gpu_rev_offsets[v_12 + 1]; edge++) {
            int u_14 = gpu_rev_srcs[edge];
            total += gpu_rank[u_14] / (gpu_offsets[u_14 + 1] - gpu_offsets[u_14]);
          }
          double newRank = (1.0 - damping) / numNodes + damping * total;
          double change = newRank - gpu_rank[v_12];
          if (change < 0.0) {
            change = 0.0 - change;
          }
          if (change >= threshold && iter < maxIter) {
            *gpu_converged = false;
          }
          gpu_rankNext[v_12] = newRank;
        }
      });
    }).wait();
    q.submit([&](sycl::handler& h) {
      h.parallel_for<class computepr_kernel_2>(sycl::range<1>(NUM_THREADS), [=](sycl::id<1> graphdsl_tid) {
        for (int v_17 = graphdsl_tid[0]; v_17 < V; v_17 += NUM_THREADS) {
          gpu_rank[v_17] = gpu_rankNext[v_17];
        }
      });
    }).wait();
    iter += 1;
    q.memcpy(&converged, gpu_converged, sizeof(bool)).wait();
  }
  q.memcpy(rank, gpu_rank, sizeof(double) * V).wait();
  q.memcpy(rankNext, gpu_rankNext, sizeof(double) * V).wait();
  sycl::free(gpu_offsets, q);
  sycl::free(gpu_rev_offsets, q);
  sycl::free(gpu_rev_srcs, q);
  sycl::free(gpu_rev_eid, q);
  sycl::free(gpu_rank, q);
  sycl::free(gpu_rankNext, q);
  sycl::free(gpu_converged, q);
  sycl::free(gpu_dangling, q);
  free(rankNext);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s <graph> <directed 0|1> <damping> <threshold> <maxIter>\n", argv[0]);
    return 2;
  }
  sycl::queue q{sycl::default_selector_v};
  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));
  int V = g.n;
  (void)V;
  double damping = (double)atof(argv[3]);
  double threshold = (double)atof(argv[4]);
  int maxIter = (int)atoll(argv[5]);
  double* rank = (double*)calloc(V, sizeof(double));
  computepr(q, g, damping, threshold, maxIter, rank);
  for (int i = 0; i < V; i++) {
    printf("rank\t%d\t%.17g\n", i, (double)rank[i]);
  }
  graphdsl_free_graph(&g);
  return 0;
}
