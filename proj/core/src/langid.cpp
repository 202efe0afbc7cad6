#include "forge/langid.hpp"

#include <algorithm>
#include <cmath>

namespace forge {
namespace {

struct Sample {
  const char* language;
  const char* text;
};

// Small hand-written corpora. English leans on the vocabulary of code
// documentation so identifiers and API words do not pull it elsewhere.
const Sample kSamples[] = {
    {"en",
     "Returns the number of elements in this list. If the list contains more "
     "than the maximum value, the result is undefined. Creates a new instance "
     "of the class with the given name and options. Sets the value of the "
     "field to the specified object. This method is called when the user "
     "clicks the button. Gets the current state of the connection and checks "
     "whether the request has finished. Parse the input string and return a "
     "list of tokens. Throws an exception if the file does not exist. Write "
     "the data to the output stream and flush the buffer. Initialize the "
     "database connection using the provided configuration. Converts the "
     "given path into an absolute path relative to the working directory. "
     "Load the model weights from disk and move them to the device. Helper "
     "function that computes the hash of a key. Remove all items from the "
     "cache that have expired. Update the record with the new values and "
     "save it. Handle the incoming message and dispatch it to the right "
     "handler. Check if the string is empty or contains only whitespace. "
     "Adds two numbers together and returns the sum. Builds the query for "
     "the search endpoint. Validates the arguments passed to the program and "
     "prints usage information on error. Read a configuration file and merge "
     "it with the defaults. Wait for all threads to complete before "
     "returning. The callback receives the response body as its first "
     "argument. Find the index of the first matching element, or negative "
     "one if none is found. Start the server and listen for connections on "
     "the port. Sort the array in place using the comparison function. "
     "Deletes the asset and all of its versions. Fetch the user profile from "
     "the remote service. Encode the payload as JSON and send it with the "
     "authorization header. Render the template with the context variables. "
     "Close the socket and release any resources held by this object. "
     "Create a slice of the array with elements dropped from the end. "
     "Resolve the dependency graph and report any cycles that were found. "
     "Lexical tokenizer for the expression language. Set the trust level for "
     "a key in the keychain. Recursive filter design using a least squares "
     "method. Pull packages data directory. Constructs a model from a plain "
     "object. Determines whether the specified value is a valid identifier. "
     "Schedule the job to run after a delay. Format the date according to "
     "the locale. Append a line to the log with a timestamp. Returns true "
     "when the node has no children. Compute the mean and standard deviation "
     "of the samples. Opens a file for reading and writing. This file was "
     "generated by the code generator, do not edit it by hand. Begin user "
     "documentation here and end user documentation there. Returns the "
     "document for the user. Marks the end of the block. Deprecated, use the "
     "new method instead. Work in progress, not ready yet. Whether the "
     "object is visible on screen. Tests that the parser handles nested "
     "brackets. Return the default encoding for text files."},
    {"en",
     "increment the counter by one and keep going until the loop ends. "
     "multiply the width by the height to get the area of the box. divide "
     "the total by the number of samples to get the average. lower case the "
     "name so that lookups ignore capitalization and spacing. skip empty "
     "lines and comments while reading the file. swap the two values if they "
     "are out of order. make a copy so the caller can keep using the "
     "original. fall back to the slow path when the cache is cold. round the "
     "price to two decimal places before showing it. we need this because "
     "the quantity can be zero for free items. keep track of how many bytes "
     "were written so far. clamp the index to the valid range. reset the "
     "timer after every successful request. bail out early if there is "
     "nothing to do. join the parts with a single space and trim the result. "
     "this is a workaround for an old compiler bug. shift left by eight bits "
     "and mask off the high byte. avoid a second lookup by caching the "
     "pointer. count the words in each line and store the totals in a map. "
     "the first element is always the header row. strip trailing slashes "
     "from the path. grow the buffer by doubling its capacity. query the "
     "table for rows that match the filter. ignore errors from the optional "
     "cleanup step. notify every listener that the value changed. split the "
     "input on commas and convert each field to a number. sum the squares of "
     "the differences. print a warning and continue with the next item. "
     "look up the user by email address. wrap the call in a retry loop with "
     "exponential backoff. check the flag before touching the shared state. "
     "parse the header and then read the body. wait for the worker threads "
     "to finish their jobs. the size must be a power of two. convert "
     "kilometers to miles using the standard factor. sort by date, newest "
     "first. draw the border around the window. pick a random sample of the "
     "records. apply the discount to every product in the order."},
    {"pt",
     "Retorna uma estrutura com os argumentos passados para o programa. "
     "Esta função calcula o valor total da lista e devolve o resultado. Cria "
     "uma nova instância da classe com o nome informado. Verifica se o "
     "usuário está autenticado antes de acessar a página. Lê o arquivo de "
     "configuração e carrega as opções padrão. Atualiza os dados do cliente "
     "no banco de dados. Método responsável por enviar a mensagem para o "
     "servidor. Converte a data para o formato brasileiro. Remove os itens "
     "duplicados da coleção. Obtém a lista de produtos cadastrados no "
     "sistema. Inicializa a conexão com o serviço remoto e aguarda a "
     "resposta. Salva as alterações feitas pelo usuário. Valida os campos do "
     "formulário e exibe uma mensagem de erro quando necessário. Função "
     "auxiliar que gera o código de acesso. Busca o registro pelo "
     "identificador e retorna nulo se não encontrar."},
    {"es",
     "Devuelve el número de elementos de la lista. Esta función calcula el "
     "valor total y devuelve el resultado. Crea una nueva instancia de la "
     "clase con el nombre indicado. Comprueba si el usuario está "
     "autenticado antes de acceder a la página. Lee el archivo de "
     "configuración y carga las opciones por defecto. Actualiza los datos "
     "del cliente en la base de datos. Método encargado de enviar el mensaje "
     "al servidor. Convierte la fecha al formato local. Elimina los "
     "elementos duplicados de la colección. Obtiene la lista de productos "
     "registrados en el sistema. Inicializa la conexión con el servicio "
     "remoto y espera la respuesta. Guarda los cambios realizados por el "
     "usuario. Valida los campos del formulario y muestra un mensaje de "
     "error cuando sea necesario. Busca el registro por su identificador."},
    {"fr",
     "Retourne le nombre d'éléments de la liste. Cette fonction calcule la "
     "valeur totale et renvoie le résultat. Crée une nouvelle instance de la "
     "classe avec le nom donné. Vérifie si l'utilisateur est authentifié "
     "avant d'accéder à la page. Lit le fichier de configuration et charge "
     "les options par défaut. Met à jour les données du client dans la base "
     "de données. Méthode chargée d'envoyer le message au serveur. Convertit "
     "la date au format local. Supprime les éléments en double de la "
     "collection. Récupère la liste des produits enregistrés dans le "
     "système. Initialise la connexion avec le service distant et attend la "
     "réponse. Enregistre les modifications faites par l'utilisateur. Valide "
     "les champs du formulaire et affiche un message d'erreur si besoin."},
    {"de",
     "Gibt die Anzahl der Elemente in der Liste zurück. Diese Funktion "
     "berechnet den Gesamtwert und liefert das Ergebnis. Erzeugt eine neue "
     "Instanz der Klasse mit dem angegebenen Namen. Prüft, ob der Benutzer "
     "angemeldet ist, bevor die Seite geöffnet wird. Liest die "
     "Konfigurationsdatei und lädt die Standardwerte. Aktualisiert die Daten "
     "des Kunden in der Datenbank. Methode, die die Nachricht an den Server "
     "sendet. Wandelt das Datum in das lokale Format um. Entfernt doppelte "
     "Einträge aus der Sammlung. Holt die Liste der Produkte aus dem System. "
     "Initialisiert die Verbindung zum entfernten Dienst und wartet auf die "
     "Antwort. Speichert die Änderungen des Benutzers. Überprüft die Felder "
     "des Formulars und zeigt bei Bedarf eine Fehlermeldung an."},
    {"it",
     "Restituisce il numero di elementi della lista. Questa funzione calcola "
     "il valore totale e restituisce il risultato. Crea una nuova istanza "
     "della classe con il nome indicato. Controlla se l'utente è "
     "autenticato prima di accedere alla pagina. Legge il file di "
     "configurazione e carica le opzioni predefinite. Aggiorna i dati del "
     "cliente nel database. Metodo che invia il messaggio al server. "
     "Converte la data nel formato locale. Rimuove gli elementi duplicati "
     "dalla collezione. Ottiene l'elenco dei prodotti registrati nel "
     "sistema. Inizializza la connessione con il servizio remoto e attende "
     "la risposta. Salva le modifiche fatte dall'utente."},
    {"nl",
     "Geeft het aantal elementen in de lijst terug. Deze functie berekent "
     "de totale waarde en geeft het resultaat terug. Maakt een nieuwe "
     "instantie van de klasse met de opgegeven naam. Controleert of de "
     "gebruiker is ingelogd voordat de pagina wordt geopend. Leest het "
     "configuratiebestand en laadt de standaardwaarden. Werkt de gegevens "
     "van de klant bij in de database. Methode die het bericht naar de "
     "server stuurt. Zet de datum om naar het lokale formaat. Verwijdert "
     "dubbele items uit de verzameling. Haalt de lijst met producten op uit "
     "het systeem. Slaat de wijzigingen van de gebruiker op."},
    {"id",
     "Mengembalikan jumlah elemen dalam daftar. Fungsi ini menghitung nilai "
     "total dan mengembalikan hasilnya. Membuat instance baru dari kelas "
     "dengan nama yang diberikan. Memeriksa apakah pengguna sudah masuk "
     "sebelum membuka halaman. Membaca berkas konfigurasi dan memuat nilai "
     "bawaan. Memperbarui data pelanggan di basis data. Metode untuk "
     "mengirim pesan ke server. Mengubah tanggal ke format lokal. Menghapus "
     "data yang duplikat dari koleksi. Mengambil daftar produk dari sistem. "
     "Menyimpan perubahan yang dibuat oleh pengguna."},
    {"vi",
     "Trả về số lượng phần tử trong danh sách. Hàm này tính tổng giá trị và "
     "trả về kết quả. Tạo một đối tượng mới của lớp với tên đã cho. Kiểm "
     "tra xem người dùng đã đăng nhập trước khi truy cập trang. Đọc tệp cấu "
     "hình và tải các tùy chọn mặc định. Cập nhật dữ liệu khách hàng trong "
     "cơ sở dữ liệu. Phương thức gửi tin nhắn đến máy chủ. Chuyển đổi ngày "
     "sang định dạng địa phương. Xóa các phần tử trùng lặp khỏi danh sách. "
     "Lưu các thay đổi của người dùng."},
};

constexpr std::size_t kMinLetters = 8;
// Code comments are overwhelmingly English; the remaining mass is shared
// evenly by the other profiles.
constexpr double kEnglishPrior = 0.5;

// Decodes one UTF-8 code point; malformed bytes decode as U+FFFD.
char32_t next_cp(std::string_view s, std::size_t& i) {
  const auto b = static_cast<unsigned char>(s[i]);
  int len = b < 0x80 ? 1 : (b >> 5) == 6 ? 2 : (b >> 4) == 14 ? 3 : (b >> 3) == 30 ? 4 : 0;
  if (len == 0 || i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return 0xFFFD;
  }
  char32_t cp = len == 1 ? b : b & (0x7F >> len);
  for (int k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((c & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

bool latin_letter(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 0xC0 && c <= 0x24F && c != 0xD7 &&
                                    c != 0xF7) ||
         (c >= 0x1E00 && c <= 0x1EFF);
}

// Letters outside the Latin ranges (Cyrillic, CJK, Arabic, ...). Symbol and
// punctuation blocks are excluded.
bool foreign_letter(char32_t c) {
  if (c < 0x250 || c == 0xFFFD) return false;
  if (c >= 0x1E00 && c <= 0x1EFF) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE00 && c <= 0xFE6F) return false;
  if (c >= 0xFF00 && c <= 0xFF20) return false;
  if (c >= 0x1F000) return false;
  return true;
}

char32_t fold(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

struct Features {
  std::vector<std::uint64_t> trigrams;
  std::size_t latin = 0;
  std::size_t foreign = 0;
};

Features featurize(std::string_view text) {
  Features f;
  std::vector<char32_t> chars{U' '};
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t c = fold(next_cp(text, i));
    if (latin_letter(c)) {
      ++f.latin;
      chars.push_back(c);
    } else {
      if (foreign_letter(c)) ++f.foreign;
      if (chars.back() != U' ') chars.push_back(U' ');
    }
  }
  if (chars.back() != U' ') chars.push_back(U' ');
  for (std::size_t k = 0; k + 2 < chars.size(); ++k) {
    if (chars[k + 1] == U' ') continue;
    f.trigrams.push_back((static_cast<std::uint64_t>(chars[k]) << 42) |
                         (static_cast<std::uint64_t>(chars[k + 1]) << 21) |
                         static_cast<std::uint64_t>(chars[k + 2]));
  }
  return f;
}

}  // namespace

const LanguageIdentifier& LanguageIdentifier::builtin() {
  static const LanguageIdentifier instance = [] {
    LanguageIdentifier id;
    for (const auto& s : kSamples) id.train(s.language, s.text);
    return id;
  }();
  return instance;
}

void LanguageIdentifier::train(const std::string& language,
                               std::string_view sample) {
  auto it = std::find_if(profiles_.begin(), profiles_.end(),
                         [&](const Profile& p) { return p.name == language; });
  if (it == profiles_.end()) {
    profiles_.push_back({language, {}, 0});
    it = profiles_.end() - 1;
  }
  for (auto t : featurize(sample).trigrams) {
    ++it->counts[t];
    ++it->total;
    vocabulary_[t] = true;
  }
}

std::vector<std::pair<std::string, double>> LanguageIdentifier::posteriors(
    std::string_view text) const {
  const auto f = featurize(text);
  const double alpha = 0.5;
  const double v = static_cast<double>(vocabulary_.size()) + 1.0;
  std::vector<double> ll(profiles_.size(), 0.0);
  const double others = std::max<double>(1.0, static_cast<double>(profiles_.size()) - 1.0);
  for (std::size_t p = 0; p < profiles_.size(); ++p) {
    const auto& prof = profiles_[p];
    ll[p] = std::log(prof.name == "en" ? kEnglishPrior : (1.0 - kEnglishPrior) / others);
    const double denom = std::log(static_cast<double>(prof.total) + alpha * v);
    for (auto t : f.trigrams) {
      const auto c = prof.counts.find(t);
      const double n = c == prof.counts.end() ? 0.0 : c->second;
      ll[p] += std::log(n + alpha) - denom;
    }
  }
  const double top = ll.empty() ? 0.0 : *std::max_element(ll.begin(), ll.end());
  double z = 0.0;
  for (double x : ll) z += std::exp(x - top);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t p = 0; p < profiles_.size(); ++p)
    out.emplace_back(profiles_[p].name, std::exp(ll[p] - top) / z);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

double LanguageIdentifier::english_probability(std::string_view text) const {
  const auto f = featurize(text);
  if (f.foreign > f.latin) return 0.0;
  if (f.latin < kMinLetters) return 1.0;
  for (const auto& [name, p] : posteriors(text))
    if (name == "en") return p;
  return 0.0;
}

}  // namespace forge
