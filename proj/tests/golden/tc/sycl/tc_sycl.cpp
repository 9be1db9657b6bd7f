// Generated tc (SYCL backend)
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

static inline int graphdsl_is_edge(const int* offsets, const int* dests, int u, int v) {
  int lo = offsets[u];
  int hi = offsets[u + 1] - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (dests[mid] == v) return 1;
    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;
  }
  return 0;
}

long long computetc(sycl::queue& q, const GraphCsr& g) {
  int V = g.n;
  int E = g.m;
  (void)E;
  const int NUM_THREADS = 1024;

  // device graph (static)
  int* gpu_offsets = sycl::malloc_device<int>((V + 1), q);
  q.memcpy(gpu_offsets, g.offsets, sizeof(int) * (V + 1)).wait();
  int* gpu_dests = sycl::malloc_device<int>(E, q);
  q.memcpy(gpu_dests, g.dests, sizeof(int) * E).wait();
  // host state
  long long triangleCount = 0;
  // device state
  long long* gpu_triangleCount = sycl::malloc_device<long long>(1, q);

  triangleCount = 0;
  q.memcpy(gpu_triangleCount, &triangleCount, sizeof(long long)).wait();
  q.submit([&](sycl::handler& h) {
    h.parallel_for<class computetc_kernel_0>(sycl::range<1>(NUM_THREADS), [=](sycl::id<1> graphdsl_tid) {
      for (int v = graphdsl_tid[0]; v < V; v += NUM_THREADS) {
        for (int edge = gpu_offsets[v]; edge < gpu_offsets[v + 1]; edge++) {
          int u = gpu_dests[edge];
          if (!(u < v)) continue;
          for (int edge_1 = gpu_offsets[v]; edge_1 < gpu_offsets[v + 1]; edge_1++) {
            int w = gpu_dests[edge_1];
            if (!(w > v)) continue;
            if (graphdsl_is_edge(gpu_offsets, gpu_dests, u, w)) {
              graphdsl_atomic<long long>(*gpu_triangleCount).fetch_add((long long)(1));
            }
          }
        }
      }
    });
  }).wait();
  q.memcpy(&triangleCount, gpu_triangleCount, sizeof(long long)).wait();
  sycl::free(gpu_offsets, q);
  sycl::free(gpu_dests, q);
  sycl::free(gpu_triangleCount, q);
  return triangleCount;
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s <graph> <directed 0|1>\n", argv[0]);
    return 2;
  }
  sycl::queue q{sycl::default_selector_v};
  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));
  int V = g.n;
  (void)V;
  long long result = computetc(q, g);
  printf("return\t%lld\n", (long long)result);
  graphdsl_free_graph(&g);
  return 0;
}
