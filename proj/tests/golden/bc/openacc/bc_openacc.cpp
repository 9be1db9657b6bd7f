// Generated bc (OpenACC backend)
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <climits>

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

void computebc(const GraphCsr& g, double* bc, const int* sourceSet, int sourceSet_count) {
  int V = g.n;
  int E = g.m;
  (void)E;
  const int* offsets = g.offsets;
  const int* dests = g.dests;
  double* sigma = (double*)calloc(V, sizeof(double));
  double* delta = (double*)calloc(V, sizeof(double));
  int* level = (int*)malloc(sizeof(int) * V);
  int hops = 0;
  bool bfs_finished = false;

  #pragma acc data copyin(offsets[0:V + 1], dests[0:E])
  {
    for (int i = 0; i < V; i++) {
      bc[i] = 0.0;
    }
    #pragma acc data copy(bc[0:V])
    {
      for (int src_i = 0; src_i < sourceSet_count; src_i++) {
        int src = sourceSet[src_i];
        for (int i = 0; i < V; i++) {
          sigma[i] = 0.0;
        }
        for (int i = 0; i < V; i++) {
          delta[i] = 0.0;
        }
        sigma[src] = 1.0;
        #pragma acc data copy(delta[0:V], sigma[0:V])
        {
          for (int i = 0; i < V; i++) {
            level[i] = -1;
          }
          level[src] = 0;
          hops = 0;
          #pragma acc data copyin(level[0:V]) copy(bfs_finished)
          {
            do {
              bfs_finished = true;
              #pragma acc update device(bfs_finished)
              #pragma acc parallel loop
              for (int v = 0; v < V; v++) {
                if (level[v] == hops) {
                  for (int bfs_edge = offsets[v]; bfs_edge < offsets[v + 1]; bfs_edge++) {
                    int bfs_nbr = dests[bfs_edge];
                    if (level[bfs_nbr] == -1) {
                      level[bfs_nbr] = hops + 1;
                      bfs_finished = false;
                    }
                  }
                  for (int edge = offsets[v]; edge < offsets[v + 1]; edge++) {
                    int w_7 = dests[edge];
                    if (level[w_7] != hops + 1) continue;
                    #pragma acc atomic update
                    sigma[w_7] += sigma[v];
                  }
                }
              }
              #pragma acc update self(bfs_finished)
              hops = hops + 1;
            } while (!bfs_finished);
            hops = hops - 1;
            while (hops >= 0) {
              #pragma acc parallel loop
              for (int v = 0; v < V; v++) {
                if (level[v] == hops) {
                  if (v != src) {
                    for (int edge = offsets[v]; edge < offsets[v + 1]; edge++) {
                      int w_8 = dests[edge];
                      if (level[w_8] != hops + 1) continue;
                      #pragma acc atomic update
                      delta[v] += sigma[v] / sigma[w_8] * (1.0 + delta[w_8]);
                    }
                    #pragma acc atomic update
                    bc[v] += delta[v];
                  }
                }
              }
              hops = hops - 1;
            }
          }
        }
      }
    }
  }
  free(sigma);
  free(delta);
  free(level);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s <graph> <directed 0|1> <sourceSet>\n", argv[0]);
    return 2;
  }
  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));
  int V = g.n;
  (void)V;
  double* bc = (double*)calloc(V, sizeof(double));
  int sourceSet_count = 0;
  int* sourceSet = (int*)malloc((strlen(argv[3]) + 1) * sizeof(int));
  {
    char* list = argv[3];
    char* tok = strtok(list, ",");
    while (tok) {
      sourceSet[sourceSet_count++] = atoi(tok);
      tok = strtok(NULL, ",");
    }
  }
  computebc(g, bc, sourceSet, sourceSet_count);
  for (int i = 0; i < V; i++) {
    printf("bc\t%d\t%.17g\n", i, (double)bc[i]);
  }
  graphdsl_free_graph(&g);
  return 0;
}
